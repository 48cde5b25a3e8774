// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ulfsynth/qcserve/png.h"

#include <png.h>

#include <csetjmp>
#include <cstring>

#include "ulfsynth/util/errors.h"

namespace ulfsynth::png {

namespace {

// libpng reports errors by longjmp back into the calling function; the
// message is parked in the error pointer for the caller to rethrow.
void OnError(png_structp ptr, png_const_charp message) {
  *static_cast<std::string*>(png_get_error_ptr(ptr)) = message;
  png_longjmp(ptr, 1);
}

void OnWarning(png_structp, png_const_charp) {}

void WriteToString(png_structp ptr, png_bytep data, png_size_t length) {
  static_cast<std::string*>(png_get_io_ptr(ptr))->append(reinterpret_cast<char*>(data), length);
}

void Flush(png_structp) {}

struct ReadCursor {
  const std::string* bytes;
  size_t pos;
};

void ReadFromString(png_structp ptr, png_bytep out, png_size_t length) {
  auto* c = static_cast<ReadCursor*>(png_get_io_ptr(ptr));
  if (c->pos + length > c->bytes->size()) png_error(ptr, "truncated stream");
  std::memcpy(out, c->bytes->data() + c->pos, length);
  c->pos += length;
}

}  // namespace

std::string EncodeGray8(int width, int height, const std::vector<uint8_t>& pixels) {
  if (width <= 0 || height <= 0 ||
      pixels.size() != static_cast<size_t>(width) * static_cast<size_t>(height)) {
    throw ContractError("png: pixel buffer does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
  std::string out, error;
  png_structp ptr = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, OnError, OnWarning);
  png_infop info = png_create_info_struct(ptr);
  if (setjmp(png_jmpbuf(ptr))) {
    png_destroy_write_struct(&ptr, &info);
    throw FormatError("png: " + error);
  }
  {
    png_set_write_fn(ptr, &out, WriteToString, Flush);
    png_set_IHDR(ptr, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ptr, info);
    for (int r = 0; r < height; ++r) {
      png_write_row(ptr, const_cast<png_bytep>(pixels.data() + static_cast<size_t>(r) * width));
    }
    png_write_end(ptr, nullptr);
  }
  png_destroy_write_struct(&ptr, &info);
  return out;
}

Gray8Image DecodeGray8(const std::string& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8)) {
    throw FormatError("png: bad signature");
  }
  Gray8Image img;
  ReadCursor cursor{&bytes, 0};
  std::string error;
  png_structp ptr = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, OnError, OnWarning);
  png_infop info = png_create_info_struct(ptr);
  if (setjmp(png_jmpbuf(ptr))) {
    png_destroy_read_struct(&ptr, &info, nullptr);
    throw FormatError("png: " + error);
  }
  png_set_read_fn(ptr, &cursor, ReadFromString);
  png_read_info(ptr, info);
  const bool gray8 = png_get_color_type(ptr, info) == PNG_COLOR_TYPE_GRAY &&
                     png_get_bit_depth(ptr, info) == 8;
  if (gray8) {
    img.width = static_cast<int>(png_get_image_width(ptr, info));
    img.height = static_cast<int>(png_get_image_height(ptr, info));
    img.pixels.resize(static_cast<size_t>(img.width) * img.height);
    for (int r = 0; r < img.height; ++r) {
      png_read_row(ptr, img.pixels.data() + static_cast<size_t>(r) * img.width, nullptr);
    }
    png_read_end(ptr, nullptr);
  }
  png_destroy_read_struct(&ptr, &info, nullptr);
  if (!gray8) throw FormatError("png: not 8-bit grayscale");
  return img;
}

}  // namespace ulfsynth::png
