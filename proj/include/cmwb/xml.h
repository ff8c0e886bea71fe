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

#ifndef CMWB_XML_H_
#define CMWB_XML_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cmwb::xml {

// Minimal element tree. Names have any namespace prefix removed.
struct Element {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::string text;  // concatenated character data directly inside
  std::vector<Element> children;

  const Element *Child(std::string_view child_name) const;
  const std::string *Attribute(std::string_view key) const;
};

// Throws cmwb::Error("malformed XML: ...") with the line number.
Element Parse(std::string_view document);

// Escapes markup characters. Whitespace control characters become
// character references so parsers cannot normalize them away.
std::string Escape(std::string_view text, bool attribute);

}  // namespace cmwb::xml

#endif  // CMWB_XML_H_
