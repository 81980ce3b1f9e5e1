// Copyright 2026 The slicebench Authors.
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

#include "slicebench/dicom.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string_view>

#include "slicebench/error.hpp"

namespace slicebench::dicom {
namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFF;
constexpr Tag kItem = tag(0xFFFE, 0xE000);
constexpr Tag kItemDelimiter = tag(0xFFFE, 0xE00D);
constexpr Tag kSequenceDelimiter = tag(0xFFFE, 0xE0DD);

bool long_form_vr(const std::string& vr) {
  static const std::set<std::string> kLong = {"OB", "OD", "OF", "OL", "OV", "OW", "SQ",
                                              "SV", "UC", "UN", "UR", "UT", "UV"};
  return kLong.contains(vr);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= b_.size(); }
  std::size_t remaining() const { return b_.size() - pos_; }
  void seek(std::size_t p) { pos_ = p; }

  void need(std::size_t n) const {
    if (remaining() < n) fail(ErrorCode::kParse, "truncated DICOM stream");
  }
  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(b_[pos_] | (b_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    const std::uint32_t lo = u16();
    const std::uint32_t hi = u16();
    return lo | (hi << 16);
  }
  Tag read_tag() {
    const std::uint16_t g = u16();
    const std::uint16_t e = u16();
    return tag(g, e);
  }
  std::uint16_t peek_group() const {
    need(2);
    return static_cast<std::uint16_t>(b_[pos_] | (b_[pos_ + 1] << 8));
  }
  std::string chars(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> v(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return v;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

struct RawElement {
  Tag t = 0;
  Element element;
};

void skip_sequence(Reader& r, bool explicit_vr);

RawElement read_element(Reader& r, bool explicit_vr) {
  RawElement out;
  out.t = r.read_tag();
  if ((out.t >> 16) == 0xFFFE) fail(ErrorCode::kParse, "unexpected item tag in dataset");
  std::uint32_t length = 0;
  if (explicit_vr) {
    out.element.vr = r.chars(2);
    for (char c : out.element.vr) {
      if (c < 'A' || c > 'Z') fail(ErrorCode::kParse, "invalid VR in explicit-VR stream");
    }
    if (long_form_vr(out.element.vr)) {
      r.skip(2);
      length = r.u32();
    } else {
      length = r.u16();
    }
  } else {
    length = r.u32();
  }
  if (length == kUndefinedLength) {
    if (explicit_vr && out.element.vr != "SQ" && out.element.vr != "UN") {
      fail(ErrorCode::kParse, "encapsulated or undefined-length data is not supported");
    }
    if (out.t == tags::kPixelData) fail(ErrorCode::kParse, "encapsulated pixel data is not supported");
    skip_sequence(r, explicit_vr);
    out.element.vr = "SQ";
    return out;
  }
  out.element.value = r.bytes(length);
  return out;
}

void skip_sequence(Reader& r, bool explicit_vr) {
  for (;;) {
    const Tag t = r.read_tag();
    const std::uint32_t length = r.u32();
    if (t == kSequenceDelimiter) return;
    if (t != kItem) fail(ErrorCode::kParse, "malformed sequence");
    if (length != kUndefinedLength) {
      r.skip(length);
      continue;
    }
    for (;;) {
      const std::size_t mark = r.pos();
      if (r.read_tag() == kItemDelimiter) {
        r.u32();
        break;
      }
      r.seek(mark);
      read_element(r, explicit_vr);
    }
  }
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put_u16(out, static_cast<std::uint16_t>(v));
  put_u16(out, static_cast<std::uint16_t>(v >> 16));
}

void put_element(std::vector<std::uint8_t>& out, Tag t, const Element& e) {
  std::vector<std::uint8_t> value = e.value;
  if (value.size() % 2 != 0) value.push_back(e.vr == "UI" || e.vr == "OB" ? 0 : ' ');
  put_u16(out, static_cast<std::uint16_t>(t >> 16));
  put_u16(out, static_cast<std::uint16_t>(t));
  out.push_back(static_cast<std::uint8_t>(e.vr.at(0)));
  out.push_back(static_cast<std::uint8_t>(e.vr.at(1)));
  if (long_form_vr(e.vr)) {
    put_u16(out, 0);
    put_u32(out, static_cast<std::uint32_t>(value.size()));
  } else {
    if (value.size() > 0xFFFF) fail(ErrorCode::kValidation, "DICOM value too long for short VR");
    put_u16(out, static_cast<std::uint16_t>(value.size()));
  }
  out.insert(out.end(), value.begin(), value.end());
}

Element string_element(const std::string& vr, const std::string& s) {
  return {vr, std::vector<std::uint8_t>(s.begin(), s.end())};
}

}  // namespace

void Dataset::set(Tag t, std::string vr, std::vector<std::uint8_t> value) {
  elements_[t] = Element{std::move(vr), std::move(value)};
}

void Dataset::set_string(Tag t, const std::string& vr, const std::string& value) {
  elements_[t] = string_element(vr, value);
}

void Dataset::set_u16(Tag t, std::uint16_t value) {
  elements_[t] = Element{"US", {static_cast<std::uint8_t>(value), static_cast<std::uint8_t>(value >> 8)}};
}

const Element* Dataset::find(Tag t) const {
  auto it = elements_.find(t);
  return it == elements_.end() ? nullptr : &it->second;
}

std::optional<std::string> Dataset::string(Tag t) const {
  const Element* e = find(t);
  if (e == nullptr) return std::nullopt;
  std::string s(e->value.begin(), e->value.end());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

std::optional<std::uint16_t> Dataset::u16(Tag t) const {
  const Element* e = find(t);
  if (e == nullptr) return std::nullopt;
  if (e->value.size() < 2) fail(ErrorCode::kParse, "short US value");
  return static_cast<std::uint16_t>(e->value[0] | (e->value[1] << 8));
}

std::optional<std::vector<double>> Dataset::numbers(Tag t) const {
  const auto s = string(t);
  if (!s) return std::nullopt;
  std::vector<double> out;
  std::stringstream ss(*s);
  std::string part;
  while (std::getline(ss, part, '\\')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "bad decimal string '" + part + "'");
    }
  }
  return out;
}

Dataset parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 132 || std::memcmp(bytes.data() + 128, "DICM", 4) != 0) {
    fail(ErrorCode::kParse, "missing DICM prefix");
  }
  Reader r(bytes);
  r.seek(132);
  Dataset ds;
  while (!r.at_end() && r.peek_group() == 0x0002) {
    RawElement e = read_element(r, true);
    ds.set(e.t, std::move(e.element.vr), std::move(e.element.value));
  }
  const auto ts = ds.string(tags::kTransferSyntaxUid);
  if (!ts) fail(ErrorCode::kParse, "missing transfer syntax");
  bool explicit_vr = false;
  if (*ts == kExplicitVrLittleEndian) {
    explicit_vr = true;
  } else if (*ts != kImplicitVrLittleEndian) {
    fail(ErrorCode::kParse, "unsupported transfer syntax " + *ts);
  }
  while (!r.at_end()) {
    RawElement e = read_element(r, explicit_vr);
    ds.set(e.t, std::move(e.element.vr), std::move(e.element.value));
  }
  return ds;
}

Dataset read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kParse, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  try {
    return parse(bytes);
  } catch (const Error& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> serialize(const Dataset& ds) {
  const auto sop_class = ds.string(tags::kSopClassUid).value_or(kMrImageStorage);
  const auto sop_instance = ds.string(tags::kSopInstanceUid);
  if (!sop_instance) fail(ErrorCode::kValidation, "dataset has no SOP instance UID");

  std::vector<std::uint8_t> meta;
  put_element(meta, tag(0x0002, 0x0001), Element{"OB", {0x00, 0x01}});
  put_element(meta, tag(0x0002, 0x0002), string_element("UI", sop_class));
  put_element(meta, tag(0x0002, 0x0003), string_element("UI", *sop_instance));
  put_element(meta, tags::kTransferSyntaxUid, string_element("UI", kExplicitVrLittleEndian));
  put_element(meta, tag(0x0002, 0x0012), string_element("UI", "1.2.826.0.1.3680043.10.543.1"));

  std::vector<std::uint8_t> out(128, 0);
  for (char c : std::string_view("DICM")) out.push_back(static_cast<std::uint8_t>(c));
  std::vector<std::uint8_t> group_length;
  put_u32(group_length, static_cast<std::uint32_t>(meta.size()));
  put_element(out, tag(0x0002, 0x0000), Element{"UL", group_length});
  out.insert(out.end(), meta.begin(), meta.end());
  for (const auto& [t, e] : ds.elements()) {
    if ((t >> 16) == 0x0002) continue;
    if (e.vr.size() != 2) fail(ErrorCode::kValidation, "element without VR cannot be written");
    put_element(out, t, e);
  }
  return out;
}

void write_file(const Dataset& ds, const std::filesystem::path& path) {
  const auto bytes = serialize(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace slicebench::dicom
