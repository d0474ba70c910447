// 8-bit grayscale PNG I/O through libpng's simplified API. Link PNG::PNG.
#pragma once

#include <png.h>

#include <filesystem>
#include <string>

#include "rpm/raster.hpp"

namespace rpm {

inline void write_png(const std::filesystem::path& path, const PanelRaster& r) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(r.width);
    img.height = static_cast<png_uint_32>(r.height);
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, r.pixels.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw DataError("cannot write " + path.string() + ": " + msg);
    }
}

/// Any PNG is converted to 8-bit gray; the result is marked external.
inline PanelRaster read_png(const std::filesystem::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw DataError("cannot read " + path.string() + ": " + msg);
    }
    img.format = PNG_FORMAT_GRAY;
    PanelRaster r;
    r.width = static_cast<int>(img.width);
    r.height = static_cast<int>(img.height);
    r.provenance = PanelRaster::Provenance::External;
    r.pixels.resize(PNG_IMAGE_SIZE(img));
    png_color background{255, 255, 255};
    if (!png_image_finish_read(&img, &background, r.pixels.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw DataError("cannot decode " + path.string() + ": " + msg);
    }
    return r;
}

}  // namespace rpm
