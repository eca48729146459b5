/*
 * uhfsynth - synthetic training data and evaluation tools for brain MRI
 *
 * Copyright 2026 The uhfsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "uhfsynth/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <memory>
#include <type_traits>

namespace uhfsynth::nifti {

namespace fs = std::filesystem;

namespace {

struct Header {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1;
  float intent_p2;
  float intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max;
  float cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax;
  std::int32_t glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b;
  float quatern_c;
  float quatern_d;
  float qoffset_x;
  float qoffset_y;
  float qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
static_assert(sizeof(Header) == 348, "NIfTI-1 header must be 348 bytes");

enum DataType : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kInt32 = 8,
  kFloat32 = 16,
  kFloat64 = 64,
  kInt8 = 256,
  kUint16 = 512,
  kUint32 = 768,
};

template <typename T>
void swap_bytes(T& v) {
  auto* p = reinterpret_cast<unsigned char*>(&v);
  std::reverse(p, p + sizeof(T));
}

void swap_header(Header& h) {
  swap_bytes(h.sizeof_hdr);
  swap_bytes(h.extents);
  swap_bytes(h.session_error);
  for (auto& d : h.dim) swap_bytes(d);
  swap_bytes(h.intent_p1);
  swap_bytes(h.intent_p2);
  swap_bytes(h.intent_p3);
  swap_bytes(h.intent_code);
  swap_bytes(h.datatype);
  swap_bytes(h.bitpix);
  swap_bytes(h.slice_start);
  for (auto& p : h.pixdim) swap_bytes(p);
  swap_bytes(h.vox_offset);
  swap_bytes(h.scl_slope);
  swap_bytes(h.scl_inter);
  swap_bytes(h.slice_end);
  swap_bytes(h.cal_max);
  swap_bytes(h.cal_min);
  swap_bytes(h.slice_duration);
  swap_bytes(h.toffset);
  swap_bytes(h.glmax);
  swap_bytes(h.glmin);
  swap_bytes(h.qform_code);
  swap_bytes(h.sform_code);
  swap_bytes(h.quatern_b);
  swap_bytes(h.quatern_c);
  swap_bytes(h.quatern_d);
  swap_bytes(h.qoffset_x);
  swap_bytes(h.qoffset_y);
  swap_bytes(h.qoffset_z);
  for (auto& v : h.srow_x) swap_bytes(v);
  for (auto& v : h.srow_y) swap_bytes(v);
  for (auto& v : h.srow_z) swap_bytes(v);
}

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

bool has_gz_suffix(const fs::path& path) {
  const std::string name = path.filename().string();
  return name.size() > 3 && name.compare(name.size() - 3, 3, ".gz") == 0;
}

void read_exact(gzFile f, void* dst, std::size_t bytes, const fs::path& path) {
  auto* out = static_cast<unsigned char*>(dst);
  while (bytes > 0) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bytes, 1u << 30));
    const int got = gzread(f, out, chunk);
    if (got <= 0) throw IoError("truncated or unreadable NIfTI file: " + path.string());
    out += got;
    bytes -= static_cast<std::size_t>(got);
  }
}

void write_exact(gzFile f, const void* src, std::size_t bytes, const fs::path& path) {
  const auto* in = static_cast<const unsigned char*>(src);
  while (bytes > 0) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bytes, 1u << 30));
    const int put = gzwrite(f, in, chunk);
    if (put <= 0) throw IoError("failed writing " + path.string());
    in += put;
    bytes -= static_cast<std::size_t>(put);
  }
}

Affine quatern_to_affine(const Header& h) {
  double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    const double n = 1.0 / std::sqrt(b * b + c * c + d * d);
    b *= n;
    c *= n;
    d *= n;
    a = 0;
  } else {
    a = std::sqrt(a);
  }
  const double qfac = h.pixdim[0] < 0 ? -1.0 : 1.0;
  const double dx = h.pixdim[1] > 0 ? h.pixdim[1] : 1.0;
  const double dy = h.pixdim[2] > 0 ? h.pixdim[2] : 1.0;
  const double dz = (h.pixdim[3] > 0 ? h.pixdim[3] : 1.0) * qfac;
  const double r[3][3] = {{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
                          {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
                          {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b}};
  Affine out;
  const double scale[3] = {dx, dy, dz};
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) out.m[row][col] = r[row][col] * scale[col];
  out.m[0][3] = h.qoffset_x;
  out.m[1][3] = h.qoffset_y;
  out.m[2][3] = h.qoffset_z;
  return out;
}

// Fills quatern_* and pixdim[0] from the rotational part of an affine.
void affine_to_quatern(const Affine& aff, Header& h) {
  const Vec3 s = aff.spacing();
  double r[3][3];
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) r[row][col] = aff.m[row][col] / s[col];
  const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                     r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                     r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
  double qfac = 1.0;
  if (det < 0) {
    qfac = -1.0;
    for (auto& row : r) row[2] = -row[2];
  }
  double a = r[0][0] + r[1][1] + r[2][2] + 1.0;
  double b, c, d;
  if (a > 0.5) {
    a = 0.5 * std::sqrt(a);
    b = 0.25 * (r[2][1] - r[1][2]) / a;
    c = 0.25 * (r[0][2] - r[2][0]) / a;
    d = 0.25 * (r[1][0] - r[0][1]) / a;
  } else {
    const double xd = 1.0 + r[0][0] - (r[1][1] + r[2][2]);
    const double yd = 1.0 + r[1][1] - (r[0][0] + r[2][2]);
    const double zd = 1.0 + r[2][2] - (r[0][0] + r[1][1]);
    if (xd > 1.0) {
      b = 0.5 * std::sqrt(xd);
      c = 0.25 * (r[0][1] + r[1][0]) / b;
      d = 0.25 * (r[0][2] + r[2][0]) / b;
      a = 0.25 * (r[2][1] - r[1][2]) / b;
    } else if (yd > 1.0) {
      c = 0.5 * std::sqrt(yd);
      b = 0.25 * (r[0][1] + r[1][0]) / c;
      d = 0.25 * (r[1][2] + r[2][1]) / c;
      a = 0.25 * (r[0][2] - r[2][0]) / c;
    } else {
      d = 0.5 * std::sqrt(zd);
      b = 0.25 * (r[0][2] + r[2][0]) / d;
      c = 0.25 * (r[1][2] + r[2][1]) / d;
      a = 0.25 * (r[1][0] - r[0][1]) / d;
    }
    if (a < 0) {
      b = -b;
      c = -c;
      d = -d;
    }
  }
  h.quatern_b = static_cast<float>(b);
  h.quatern_c = static_cast<float>(c);
  h.quatern_d = static_cast<float>(d);
  h.pixdim[0] = static_cast<float>(qfac);
}

struct RawImage {
  Header header{};
  std::array<int, 4> dims{1, 1, 1, 1};
  Affine affine;
  std::vector<double> values;
  bool integer_typed = false;
};

template <typename T>
void decode(const std::vector<unsigned char>& bytes, bool swapped, std::vector<double>& out) {
  const std::size_t n = bytes.size() / sizeof(T);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, bytes.data() + i * sizeof(T), sizeof(T));
    if (swapped) swap_bytes(v);
    out[i] = static_cast<double>(v);
  }
}

RawImage read_raw(const fs::path& path) {
  GzHandle f(gzopen(path.string().c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path.string());
  RawImage img;
  Header& h = img.header;
  read_exact(f.get(), &h, sizeof(Header), path);
  bool swapped = false;
  if (h.sizeof_hdr != 348) {
    swap_header(h);
    swapped = true;
    if (h.sizeof_hdr != 348) throw DataError("not a NIfTI-1 file: " + path.string());
  }
  if (std::memcmp(h.magic, "n+1", 4) != 0 && std::memcmp(h.magic, "ni1", 4) != 0)
    throw DataError("not a NIfTI-1 file (bad magic): " + path.string());
  if (std::memcmp(h.magic, "ni1", 4) == 0) throw DataError("two-file NIfTI pairs are not supported: " + path.string());
  if (h.dim[0] < 1 || h.dim[0] > 7) throw DataError("invalid dim[0] in " + path.string());
  for (int d = 0; d < 4; ++d) {
    const int n = d < h.dim[0] ? h.dim[d + 1] : 1;
    if (n < 1) throw DataError("non-positive dimension in " + path.string());
    img.dims[d] = n;
  }
  for (int d = 5; d <= h.dim[0]; ++d)
    if (h.dim[d] > 1) throw DataError("volumes above 4D are not supported: " + path.string());

  if (h.sform_code > 0) {
    for (int c = 0; c < 4; ++c) {
      img.affine.m[0][c] = h.srow_x[c];
      img.affine.m[1][c] = h.srow_y[c];
      img.affine.m[2][c] = h.srow_z[c];
    }
  } else if (h.qform_code > 0) {
    img.affine = quatern_to_affine(h);
  } else {
    img.affine = Affine{};
    for (int c = 0; c < 3; ++c) img.affine.m[c][c] = h.pixdim[c + 1] > 0 ? h.pixdim[c + 1] : 1.0;
  }
  if (!img.affine.finite()) throw DataError("non-finite affine in " + path.string());

  std::size_t elem = 0;
  switch (h.datatype) {
    case kUint8: case kInt8: elem = 1; break;
    case kInt16: case kUint16: elem = 2; break;
    case kInt32: case kUint32: case kFloat32: elem = 4; break;
    case kFloat64: elem = 8; break;
    default: throw DataError("unsupported NIfTI datatype " + std::to_string(h.datatype) + " in " + path.string());
  }
  img.integer_typed = h.datatype != kFloat32 && h.datatype != kFloat64;

  const auto offset = static_cast<std::size_t>(h.vox_offset);
  if (offset < sizeof(Header)) throw DataError("invalid vox_offset in " + path.string());
  if (offset > sizeof(Header)) {
    std::vector<unsigned char> skip(offset - sizeof(Header));
    read_exact(f.get(), skip.data(), skip.size(), path);
  }
  const std::size_t count = static_cast<std::size_t>(img.dims[0]) * img.dims[1] * img.dims[2] * img.dims[3];
  std::vector<unsigned char> bytes(count * elem);
  read_exact(f.get(), bytes.data(), bytes.size(), path);

  switch (h.datatype) {
    case kUint8: decode<std::uint8_t>(bytes, swapped, img.values); break;
    case kInt8: decode<std::int8_t>(bytes, swapped, img.values); break;
    case kInt16: decode<std::int16_t>(bytes, swapped, img.values); break;
    case kUint16: decode<std::uint16_t>(bytes, swapped, img.values); break;
    case kInt32: decode<std::int32_t>(bytes, swapped, img.values); break;
    case kUint32: decode<std::uint32_t>(bytes, swapped, img.values); break;
    case kFloat32: decode<float>(bytes, swapped, img.values); break;
    case kFloat64: decode<double>(bytes, swapped, img.values); break;
    default: break;
  }
  const bool scaled = h.scl_slope != 0.0f && std::isfinite(h.scl_slope) && (h.scl_slope != 1.0f || h.scl_inter != 0.0f);
  if (scaled) {
    for (double& v : img.values) v = v * h.scl_slope + h.scl_inter;
    img.integer_typed = img.integer_typed && std::floor(h.scl_slope) == h.scl_slope && std::floor(h.scl_inter) == h.scl_inter;
  }
  return img;
}

RawImage read_raw_3d(const fs::path& path) {
  RawImage img = read_raw(path);
  if (img.dims[3] != 1) throw DataError("non-3D volume: " + path.string());
  return img;
}

ScalarVolume to_scalar(const RawImage& img, std::size_t frame) {
  ScalarVolume vol(Dims{img.dims[0], img.dims[1], img.dims[2]}, img.affine);
  const std::size_t n = vol.size();
  for (std::size_t i = 0; i < n; ++i) vol.data[i] = static_cast<float>(img.values[frame * n + i]);
  return vol;
}

bool fits_labels(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) {
    return v >= 0 && v <= kMaxLabel && std::floor(v) == v;
  });
}

LabelVolume to_labels(const RawImage& img, const fs::path& path) {
  if (!fits_labels(img.values))
    throw DataError("label map must hold integers in 0.." + std::to_string(kMaxLabel) + ": " + path.string());
  LabelVolume vol(Dims{img.dims[0], img.dims[1], img.dims[2]}, img.affine);
  for (std::size_t i = 0; i < vol.size(); ++i) vol.data[i] = static_cast<std::uint16_t>(img.values[i]);
  return vol;
}

Header make_header(const Dims& dims, int frames, const Affine& affine, DataType type, int bitpix) {
  Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = static_cast<std::int16_t>(frames > 1 ? 4 : 3);
  for (int d = 0; d < 3; ++d) {
    if (dims[d] > 32767) throw DataError("dimension too large for NIfTI-1");
    h.dim[d + 1] = static_cast<std::int16_t>(dims[d]);
  }
  h.dim[4] = static_cast<std::int16_t>(frames);
  for (int d = 5; d < 8; ++d) h.dim[d] = 1;
  h.datatype = type;
  h.bitpix = static_cast<std::int16_t>(bitpix);
  const Vec3 s = affine.spacing();
  for (int d = 0; d < 3; ++d) h.pixdim[d + 1] = static_cast<float>(s[d]);
  h.pixdim[4] = 1.0f;
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.xyzt_units = 2;  // mm
  h.qform_code = 1;
  h.sform_code = 1;
  affine_to_quatern(affine, h);
  h.qoffset_x = static_cast<float>(affine.m[0][3]);
  h.qoffset_y = static_cast<float>(affine.m[1][3]);
  h.qoffset_z = static_cast<float>(affine.m[2][3]);
  for (int c = 0; c < 4; ++c) {
    h.srow_x[c] = static_cast<float>(affine.m[0][c]);
    h.srow_y[c] = static_cast<float>(affine.m[1][c]);
    h.srow_z[c] = static_cast<float>(affine.m[2][c]);
  }
  std::strncpy(h.descrip, "uhfsynth", sizeof(h.descrip) - 1);
  std::memcpy(h.magic, "n+1", 4);
  return h;
}

template <typename T>
void write_file(const Header& h, const std::vector<const std::vector<T>*>& frames, const fs::path& path) {
  static_assert(std::endian::native == std::endian::little, "writer assumes a little-endian host");
  const std::string mode = has_gz_suffix(path) ? "wb3" : "wbT";
  GzHandle f(gzopen(path.string().c_str(), mode.c_str()));
  if (!f) throw IoError("cannot open for writing: " + path.string());
  write_exact(f.get(), &h, sizeof(Header), path);
  const char extension[4] = {0, 0, 0, 0};
  write_exact(f.get(), extension, sizeof(extension), path);
  for (const auto* frame : frames) write_exact(f.get(), frame->data(), frame->size() * sizeof(T), path);
  if (gzclose(f.release()) != Z_OK) throw IoError("failed closing " + path.string());
}

}  // namespace

ScalarVolume read_scalar(const fs::path& path) { return to_scalar(read_raw_3d(path), 0); }

LabelVolume read_labels(const fs::path& path) { return to_labels(read_raw_3d(path), path); }

std::variant<ScalarVolume, LabelVolume> read_volume(const fs::path& path) {
  RawImage img = read_raw_3d(path);
  if (img.integer_typed && fits_labels(img.values)) return to_labels(img, path);
  return to_scalar(img, 0);
}

std::vector<ScalarVolume> read_frames(const fs::path& path) {
  RawImage img = read_raw(path);
  std::vector<ScalarVolume> frames;
  frames.reserve(static_cast<std::size_t>(img.dims[3]));
  for (int t = 0; t < img.dims[3]; ++t) frames.push_back(to_scalar(img, static_cast<std::size_t>(t)));
  return frames;
}

void write_volume(const ScalarVolume& vol, const fs::path& path) {
  validate(vol);
  write_file<float>(make_header(vol.dims, 1, vol.affine, kFloat32, 32), {&vol.data}, path);
}

void write_volume(const LabelVolume& vol, const fs::path& path) {
  validate(vol);
  write_file<std::uint16_t>(make_header(vol.dims, 1, vol.affine, kUint16, 16), {&vol.data}, path);
}

void write_frames(const std::vector<ScalarVolume>& frames, const fs::path& path) {
  if (frames.empty()) throw DataError("no frames to write");
  std::vector<const std::vector<float>*> data;
  for (const auto& f : frames) {
    validate(f);
    require_same_geometry(frames.front(), f, "frames of a 4D volume");
    data.push_back(&f.data);
  }
  write_file<float>(make_header(frames.front().dims, static_cast<int>(frames.size()), frames.front().affine, kFloat32, 32),
                    data, path);
}

bool is_nifti_path(const fs::path& path) {
  const std::string name = path.filename().string();
  auto ends_with = [&](std::string_view suffix) {
    return name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".nii") || ends_with(".nii.gz");
}

std::string case_name(const fs::path& path) {
  std::string name = path.filename().string();
  for (std::string_view suffix : {".nii.gz", ".nii"}) {
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      return name.substr(0, name.size() - suffix.size());
  }
  return name;
}

}  // namespace uhfsynth::nifti
