// SPDX-License-Identifier: Apache-2.0
#include "fscs/image_io.hpp"

#include "fscs/error.hpp"

#include <fmt/format.h>
#include <png.h>

// clang-format off
#include <cstdio>
#include <jpeglib.h>
// clang-format on

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

namespace fscs
{

namespace
{

struct PngReadSource
{
    std::string_view bytes;
    std::size_t pos = 0;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t len)
{
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->pos + len > src->bytes.size())
        png_error(png, "truncated PNG stream");
    std::memcpy(out, src->bytes.data() + src->pos, len);
    src->pos += len;
}

void png_write_fn(png_structp png, png_bytep data, png_size_t len)
{
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), len);
}

void png_flush_fn(png_structp) {}

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg)
{
    throw Error(ErrorCode::ImageIo, fmt::format("libpng: {}", msg));
}

void png_warning_fn(png_structp, png_const_charp) {}

enum class PngTarget
{
    rgb8,
    raw_single_channel,
};

struct DecodedPng
{
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

DecodedPng decode_png_impl(std::string_view bytes, PngTarget target)
{
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
        throw Error(ErrorCode::ImageIo, "not a PNG stream");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png_create_info_struct(png);
    struct Guard
    {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard {&png, &info};

    auto source = PngReadSource {bytes, 0};
    png_set_read_fn(png, &source, png_read_fn);
    png_read_info(png, info);

    auto const width = static_cast<int>(png_get_image_width(png, info));
    auto const height = static_cast<int>(png_get_image_height(png, info));
    auto const color = png_get_color_type(png, info);
    auto const depth = png_get_bit_depth(png, info);

    if (depth == 16)
        png_set_strip_16(png);

    if (target == PngTarget::rgb8)
    {
        if (color == PNG_COLOR_TYPE_PALETTE)
            png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        if (color & PNG_COLOR_MASK_ALPHA)
            png_set_strip_alpha(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS))
            png_set_strip_alpha(png);
    }
    else
    {
        if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE)
            throw Error(ErrorCode::ImageIo, "annotation PNG must be grayscale or palette");
        if (depth < 8)
            png_set_packing(png);
    }
    png_read_update_info(png, info);

    auto out = DecodedPng {width, height, static_cast<int>(png_get_channels(png, info)), {}};
    auto const rowbytes = png_get_rowbytes(png, info);
    out.data.resize(rowbytes * std::size_t(height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[std::size_t(y)] = out.data.data() + rowbytes * std::size_t(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    return out;
}

std::string encode_png_impl(int width, int height, int color_type, int bit_depth,
                            const std::vector<std::vector<std::uint8_t>>& rows)
{
    std::string out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png_create_info_struct(png);
    struct Guard
    {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard {&png, &info};

    png_set_write_fn(png, &out, png_write_fn, png_flush_fn);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    for (auto const& row: rows)
        png_write_row(png, row.data());
    png_write_end(png, nullptr);
    return out;
}

} // namespace

std::string encode_png(const Image& image)
{
    if (image.empty())
        throw Error(ErrorCode::ImageIo, "cannot encode an empty image");
    auto const stride = std::size_t(image.width()) * 3;
    auto const px = image.pixels();
    std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y)
        rows[std::size_t(y)].assign(px.begin() + std::ptrdiff_t(stride * std::size_t(y)),
                                    px.begin() + std::ptrdiff_t(stride * std::size_t(y + 1)));
    return encode_png_impl(image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

Image decode_png(std::string_view bytes)
{
    auto decoded = decode_png_impl(bytes, PngTarget::rgb8);
    if (decoded.channels != 3)
        throw Error(ErrorCode::ImageIo, "unexpected channel count after PNG transforms");
    return Image(decoded.width, decoded.height, std::move(decoded.data));
}

std::string encode_mask_png(const BinaryMask& mask)
{
    std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(mask.height()));
    for (int y = 0; y < mask.height(); ++y)
    {
        auto& row = rows[std::size_t(y)];
        row.assign((std::size_t(mask.width()) + 7) / 8, 0);
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y))
                row[std::size_t(x) / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    }
    return encode_png_impl(mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 1, rows);
}

BinaryMask decode_mask_png(std::string_view bytes)
{
    auto raster = decode_indexed_png(bytes);
    return BinaryMask(raster.width, raster.height, std::move(raster.values));
}

IndexedRaster decode_indexed_png(std::string_view bytes)
{
    auto decoded = decode_png_impl(bytes, PngTarget::raw_single_channel);
    if (decoded.channels != 1)
        throw Error(ErrorCode::ImageIo, "annotation PNG must have one channel");
    return {decoded.width, decoded.height, std::move(decoded.data)};
}

std::string encode_indexed_png(const IndexedRaster& raster)
{
    std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(raster.height));
    for (int y = 0; y < raster.height; ++y)
    {
        auto const begin = raster.values.begin() + std::ptrdiff_t(std::size_t(y) * std::size_t(raster.width));
        rows[std::size_t(y)].assign(begin, begin + raster.width);
    }
    return encode_png_impl(raster.width, raster.height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

namespace
{

struct JpegErrorManager
{
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

} // namespace

Image decode_jpeg(std::string_view bytes)
{
    jpeg_decompress_struct cinfo {};
    JpegErrorManager err {};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;

    std::vector<std::uint8_t> data;
    int width = 0;
    int height = 0;
    if (setjmp(err.jump))
    {
        jpeg_destroy_decompress(&cinfo);
        throw Error(ErrorCode::ImageIo, fmt::format("libjpeg: {}", err.message));
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    data.resize(std::size_t(width) * std::size_t(height) * 3);
    while (cinfo.output_scanline < cinfo.output_height)
    {
        JSAMPROW row = data.data() + std::size_t(cinfo.output_scanline) * std::size_t(width) * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return Image(width, height, std::move(data));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ImageIo, fmt::format("cannot open {}", path.string()));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::ImageIo, fmt::format("cannot write {}", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace
{

bool is_jpeg(std::string_view bytes)
{
    return bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xff
           && static_cast<unsigned char>(bytes[1]) == 0xd8 && static_cast<unsigned char>(bytes[2]) == 0xff;
}

} // namespace

Image load_image(const std::filesystem::path& path)
{
    auto const bytes = read_file(path);
    return is_jpeg(bytes) ? decode_jpeg(bytes) : decode_png(bytes);
}

void save_png(const std::filesystem::path& path, const Image& image)
{
    write_file(path, encode_png(image));
}

ImageDims probe_dims(const std::filesystem::path& path)
{
    auto const bytes = read_file(path);
    if (is_jpeg(bytes))
    {
        auto const img = decode_jpeg(bytes);
        return {img.width(), img.height()};
    }
    // IHDR follows the 8-byte signature and an 8-byte chunk header.
    if (bytes.size() < 24 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
        throw Error(ErrorCode::ImageIo, fmt::format("{} is neither PNG nor JPEG", path.string()));
    auto const be32 = [&](std::size_t pos) {
        return int((static_cast<unsigned char>(bytes[pos]) << 24) | (static_cast<unsigned char>(bytes[pos + 1]) << 16)
                   | (static_cast<unsigned char>(bytes[pos + 2]) << 8) | static_cast<unsigned char>(bytes[pos + 3]));
    };
    return {be32(16), be32(20)};
}

} // namespace fscs
