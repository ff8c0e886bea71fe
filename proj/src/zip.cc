// Copyright 2026 The cmwb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmwb/zip.h"

#include <zlib.h>

#include <cstdint>

#include "cmwb/error.h"

namespace cmwb::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kUtf8Flag = 0x0800;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

void Put16(std::string *out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>(v >> 8));
}

void Put32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

std::uint32_t Crc32(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto chunk = static_cast<uInt>(
        std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef *>(data.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint16_t U16(std::size_t at) const {
    Need(at, 2);
    return static_cast<std::uint16_t>(Byte(at) | (Byte(at + 1) << 8));
  }
  std::uint32_t U32(std::size_t at) const {
    Need(at, 4);
    return static_cast<std::uint32_t>(Byte(at)) |
           (static_cast<std::uint32_t>(Byte(at + 1)) << 8) |
           (static_cast<std::uint32_t>(Byte(at + 2)) << 16) |
           (static_cast<std::uint32_t>(Byte(at + 3)) << 24);
  }
  std::string_view Bytes(std::size_t at, std::size_t n) const {
    Need(at, n);
    return data_.substr(at, n);
  }
  std::size_t size() const { return data_.size(); }

 private:
  unsigned Byte(std::size_t at) const {
    return static_cast<unsigned char>(data_[at]);
  }
  void Need(std::size_t at, std::size_t n) const {
    if (at > data_.size() || n > data_.size() - at) {
      throw Error("corrupt zip archive: truncated");
    }
  }
  std::string_view data_;
};

std::string Inflate(std::string_view compressed, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw Error("zip: inflate initialisation failed");
  }
  zs.next_in = reinterpret_cast<Bytef *>(const_cast<char *>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = reinterpret_cast<Bytef *>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) {
    throw Error("corrupt zip archive: bad deflate stream");
  }
  return out;
}

}  // namespace

std::string Write(const std::vector<Entry> &entries) {
  std::string out;
  std::string central;
  for (const auto &e : entries) {
    const std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    const std::uint32_t crc = Crc32(e.data);
    const auto size = static_cast<std::uint32_t>(e.data.size());
    const auto name_len = static_cast<std::uint16_t>(e.name.size());

    Put32(&out, kLocalSig);
    Put16(&out, 10);  // version needed: stored
    Put16(&out, kUtf8Flag);
    Put16(&out, 0);  // method: stored
    Put16(&out, 0);  // time
    Put16(&out, kDosDate);
    Put32(&out, crc);
    Put32(&out, size);
    Put32(&out, size);
    Put16(&out, name_len);
    Put16(&out, 0);
    out += e.name;
    out += e.data;

    Put32(&central, kCentralSig);
    Put16(&central, 20);  // version made by
    Put16(&central, 10);
    Put16(&central, kUtf8Flag);
    Put16(&central, 0);
    Put16(&central, 0);
    Put16(&central, kDosDate);
    Put32(&central, crc);
    Put32(&central, size);
    Put32(&central, size);
    Put16(&central, name_len);
    Put16(&central, 0);  // extra
    Put16(&central, 0);  // comment
    Put16(&central, 0);  // disk
    Put16(&central, 0);  // internal attributes
    Put32(&central, 0);  // external attributes
    Put32(&central, offset);
    central += e.name;
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  Put32(&out, kEndSig);
  Put16(&out, 0);
  Put16(&out, 0);
  Put16(&out, static_cast<std::uint16_t>(entries.size()));
  Put16(&out, static_cast<std::uint16_t>(entries.size()));
  Put32(&out, static_cast<std::uint32_t>(central.size()));
  Put32(&out, cd_offset);
  Put16(&out, 0);
  return out;
}

std::vector<Entry> Read(std::string_view archive) {
  Reader r(archive);
  if (archive.size() < 22) throw Error("not a zip archive");
  std::size_t end = archive.size() - 22;
  for (;;) {
    if (r.U32(end) == kEndSig) break;
    if (end == 0 || archive.size() - end > 22 + 0xFFFF) {
      throw Error("not a zip archive: end of central directory not found");
    }
    --end;
  }
  const std::uint16_t count = r.U16(end + 10);
  std::size_t pos = r.U32(end + 16);
  std::vector<Entry> entries;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (r.U32(pos) != kCentralSig) {
      throw Error("corrupt zip archive: bad central directory");
    }
    const std::uint16_t method = r.U16(pos + 10);
    const std::uint32_t crc = r.U32(pos + 16);
    const std::uint32_t csize = r.U32(pos + 20);
    const std::uint32_t usize = r.U32(pos + 24);
    const std::uint16_t name_len = r.U16(pos + 28);
    const std::uint16_t extra_len = r.U16(pos + 30);
    const std::uint16_t comment_len = r.U16(pos + 32);
    const std::uint32_t local = r.U32(pos + 42);
    Entry e;
    e.name = std::string(r.Bytes(pos + 46, name_len));
    pos += 46 + name_len + extra_len + comment_len;

    if (r.U32(local) != kLocalSig) {
      throw Error("corrupt zip archive: bad local header for " + e.name);
    }
    const std::size_t data_at = local + 30 + r.U16(local + 26) +
                                r.U16(local + 28);
    const std::string_view raw = r.Bytes(data_at, csize);
    if (method == 0) {
      e.data = std::string(raw);
    } else if (method == 8) {
      e.data = Inflate(raw, usize);
    } else {
      throw Error("zip entry " + e.name + " uses unsupported method " +
                  std::to_string(method));
    }
    if (Crc32(e.data) != crc) throw Error("zip entry " + e.name + ": bad CRC");
    if (e.name.ends_with('/')) continue;  // directory entry
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace cmwb::zip
