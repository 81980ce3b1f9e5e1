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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slicebench::dicom {

/// (group << 16) | element.
using Tag = std::uint32_t;

constexpr Tag tag(std::uint16_t group, std::uint16_t element) {
  return (static_cast<Tag>(group) << 16) | element;
}

namespace tags {
inline constexpr Tag kTransferSyntaxUid = tag(0x0002, 0x0010);
inline constexpr Tag kSopClassUid = tag(0x0008, 0x0016);
inline constexpr Tag kSopInstanceUid = tag(0x0008, 0x0018);
inline constexpr Tag kModality = tag(0x0008, 0x0060);
inline constexpr Tag kManufacturer = tag(0x0008, 0x0070);
inline constexpr Tag kSeriesDescription = tag(0x0008, 0x103E);
inline constexpr Tag kPatientName = tag(0x0010, 0x0010);
inline constexpr Tag kPatientId = tag(0x0010, 0x0020);
inline constexpr Tag kBodyPartExamined = tag(0x0018, 0x0015);
inline constexpr Tag kScanningSequence = tag(0x0018, 0x0020);
inline constexpr Tag kSliceThickness = tag(0x0018, 0x0050);
inline constexpr Tag kRepetitionTime = tag(0x0018, 0x0080);
inline constexpr Tag kEchoTime = tag(0x0018, 0x0081);
inline constexpr Tag kMagneticFieldStrength = tag(0x0018, 0x0087);
inline constexpr Tag kStudyInstanceUid = tag(0x0020, 0x000D);
inline constexpr Tag kSeriesInstanceUid = tag(0x0020, 0x000E);
inline constexpr Tag kInstanceNumber = tag(0x0020, 0x0013);
inline constexpr Tag kImagePositionPatient = tag(0x0020, 0x0032);
inline constexpr Tag kImageOrientationPatient = tag(0x0020, 0x0037);
inline constexpr Tag kSamplesPerPixel = tag(0x0028, 0x0002);
inline constexpr Tag kPhotometricInterpretation = tag(0x0028, 0x0004);
inline constexpr Tag kNumberOfFrames = tag(0x0028, 0x0008);
inline constexpr Tag kRows = tag(0x0028, 0x0010);
inline constexpr Tag kColumns = tag(0x0028, 0x0011);
inline constexpr Tag kPixelSpacing = tag(0x0028, 0x0030);
inline constexpr Tag kBitsAllocated = tag(0x0028, 0x0100);
inline constexpr Tag kBitsStored = tag(0x0028, 0x0101);
inline constexpr Tag kHighBit = tag(0x0028, 0x0102);
inline constexpr Tag kPixelRepresentation = tag(0x0028, 0x0103);
inline constexpr Tag kRescaleIntercept = tag(0x0028, 0x1052);
inline constexpr Tag kRescaleSlope = tag(0x0028, 0x1053);
inline constexpr Tag kPixelData = tag(0x7FE0, 0x0010);
}  // namespace tags

inline constexpr const char* kImplicitVrLittleEndian = "1.2.840.10008.1.2";
inline constexpr const char* kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";
inline constexpr const char* kMrImageStorage = "1.2.840.10008.5.1.4.1.1.4";

struct Element {
  std::string vr;  // empty when read from an implicit-VR stream
  std::vector<std::uint8_t> value;
};

/// Top-level elements of one DICOM object. Sequence contents are skipped on
/// read.
class Dataset {
 public:
  void set(Tag t, std::string vr, std::vector<std::uint8_t> value);
  void set_string(Tag t, const std::string& vr, const std::string& value);
  void set_u16(Tag t, std::uint16_t value);

  bool has(Tag t) const { return elements_.contains(t); }
  const Element* find(Tag t) const;

  /// Value with trailing spaces and NULs removed.
  std::optional<std::string> string(Tag t) const;
  std::optional<std::uint16_t> u16(Tag t) const;
  /// Backslash-separated decimal string (DS / IS) values.
  std::optional<std::vector<double>> numbers(Tag t) const;

  const std::map<Tag, Element>& elements() const { return elements_; }

 private:
  std::map<Tag, Element> elements_;
};

/// Reads a Part-10 file in implicit or explicit VR little endian. Throws
/// kParse for anything else.
Dataset read_file(const std::filesystem::path& path);
Dataset parse(std::span<const std::uint8_t> bytes);

/// Writes a Part-10 file in explicit VR little endian; the file meta group is
/// generated from the dataset's SOP class and instance UIDs.
void write_file(const Dataset& dataset, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize(const Dataset& dataset);

}  // namespace slicebench::dicom
