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

#include "cmwb/xml.h"

#include <expat.h>

#include <memory>

#include "cmwb/error.h"

namespace cmwb::xml {

const Element *Element::Child(std::string_view child_name) const {
  for (const auto &c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

const std::string *Element::Attribute(std::string_view key) const {
  auto it = attributes.find(std::string(key));
  return it == attributes.end() ? nullptr : &it->second;
}

namespace {

std::string LocalName(const char *name) {
  std::string_view n(name);
  const auto colon = n.rfind(':');
  return std::string(colon == std::string_view::npos ? n : n.substr(colon + 1));
}

struct Builder {
  Element root;
  std::vector<Element *> stack;
  bool has_root = false;
};

void OnStart(void *user, const XML_Char *name, const XML_Char **attrs) {
  auto *b = static_cast<Builder *>(user);
  Element e;
  e.name = LocalName(name);
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    e.attributes[LocalName(attrs[i])] = attrs[i + 1];
  }
  if (b->stack.empty()) {
    b->root = std::move(e);
    b->has_root = true;
    b->stack.push_back(&b->root);
  } else {
    auto &children = b->stack.back()->children;
    children.push_back(std::move(e));
    b->stack.push_back(&children.back());
  }
}

void OnEnd(void *user, const XML_Char *) {
  static_cast<Builder *>(user)->stack.pop_back();
}

void OnText(void *user, const XML_Char *s, int len) {
  auto *b = static_cast<Builder *>(user);
  if (!b->stack.empty()) b->stack.back()->text.append(s, len);
}

}  // namespace

Element Parse(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw Error("cannot create XML parser");
  Builder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), OnStart, OnEnd);
  XML_SetCharacterDataHandler(parser.get(), OnText);
  if (XML_Parse(parser.get(), document.data(),
                static_cast<int>(document.size()), 1) == XML_STATUS_ERROR) {
    throw Error(std::string("malformed XML: ") +
                XML_ErrorString(XML_GetErrorCode(parser.get())) + " at line " +
                std::to_string(XML_GetCurrentLineNumber(parser.get())));
  }
  if (!builder.has_root) throw Error("malformed XML: no root element");
  return std::move(builder.root);
}

std::string Escape(std::string_view text, bool attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      case '\r': out += "&#13;"; break;
      case '\n': out += attribute ? "&#10;" : "\n"; break;
      case '\t': out += attribute ? "&#9;" : "\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace cmwb::xml
