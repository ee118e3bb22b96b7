#include "texturekit/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "texturekit/errors.hpp"

namespace texturekit {

void validate_image(const GrayImage& img) {
    if (img.width < 1 || img.height < 1)
        throw ValidationError("image dimensions must be at least 1x1");
    if (img.pixels.size() != static_cast<size_t>(img.width) * img.height)
        throw ValidationError("pixel buffer size does not match width*height");
}

GrayImage resize_area(const GrayImage& img, int out_width, int out_height) {
    validate_image(img);
    if (out_width < 1 || out_height < 1)
        throw ValidationError("resize target must be at least 1x1");
    GrayImage out(out_width, out_height);
    const double sx = static_cast<double>(img.width) / out_width;
    const double sy = static_cast<double>(img.height) / out_height;
    for (int r = 0; r < out_height; ++r) {
        const double y0 = r * sy, y1 = (r + 1) * sy;
        for (int c = 0; c < out_width; ++c) {
            const double x0 = c * sx, x1 = (c + 1) * sx;
            double acc = 0.0, area = 0.0;
            for (int src_r = static_cast<int>(y0); src_r < img.height && src_r < y1; ++src_r) {
                const double hy = std::min<double>(src_r + 1, y1) - std::max<double>(src_r, y0);
                for (int src_c = static_cast<int>(x0); src_c < img.width && src_c < x1; ++src_c) {
                    const double hx =
                        std::min<double>(src_c + 1, x1) - std::max<double>(src_c, x0);
                    acc += hx * hy * img.at(src_r, src_c);
                    area += hx * hy;
                }
            }
            out.at(r, c) = area > 0 ? acc / area : 0.0;
        }
    }
    return out;
}

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
        } else if (!std::isspace(ch)) {
            tok.push_back(static_cast<char>(ch));
            while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    throw IoError("unexpected end of PGM header");
}

long parse_header_int(std::istream& in, const char* what) {
    const std::string tok = next_token(in);
    try {
        size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("bad PGM ") + what + ": '" + tok + "'");
    }
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == suffix;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5")
        throw IoError("'" + path + "' is not a PGM file (magic '" + magic + "')");
    const long width = parse_header_int(in, "width");
    const long height = parse_header_int(in, "height");
    const long maxval = parse_header_int(in, "maxval");
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
        throw IoError("'" + path + "': invalid PGM dimensions or maxval");

    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    const size_t n = img.size();
    if (magic == "P2") {
        for (size_t i = 0; i < n; ++i) {
            const long v = parse_header_int(in, "sample");
            if (v < 0 || v > maxval) throw IoError("'" + path + "': sample out of range");
            img.pixels[i] = static_cast<double>(v) / maxval;
        }
    } else {
        in.get();  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<size_t>(in.gcount()) != raw.size())
            throw IoError("'" + path + "': truncated PGM payload");
        for (size_t i = 0; i < n; ++i) {
            const unsigned v = bytes == 2 ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
            if (v > static_cast<unsigned>(maxval))
                throw IoError("'" + path + "': sample out of range");
            img.pixels[i] = static_cast<double>(v) / maxval;
        }
    }
    return img;
}

GrayImage read_png_gray(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open '" + path + "'");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("libpng initialization failed");
    }
    std::vector<std::vector<png_byte>> rows;
    GrayImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("'" + path + "': PNG decode error");
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw ValidationError("'" + path + "': only grayscale PNG is supported");
    }
    if (bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        bit_depth = 8;
    }
    png_read_update_info(png, info);

    rows.assign(height, std::vector<png_byte>(png_get_rowbytes(png, info)));
    std::vector<png_bytep> row_ptrs(height);
    for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = rows[r].data();
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    img = GrayImage(static_cast<int>(width), static_cast<int>(height));
    const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
    for (png_uint_32 r = 0; r < height; ++r) {
        for (png_uint_32 c = 0; c < width; ++c) {
            const unsigned v = bit_depth == 16
                                   ? (rows[r][2 * c] << 8 | rows[r][2 * c + 1])
                                   : rows[r][c];
            img.at(static_cast<int>(r), static_cast<int>(c)) = v / maxval;
        }
    }
    return img;
}

GrayImage read_image(const std::string& path) {
    if (has_suffix(path, ".png")) return read_png_gray(path);
    if (has_suffix(path, ".pgm") || has_suffix(path, ".pnm")) return read_pgm(path);
    throw IoError("unsupported image format: '" + path + "' (expected .pgm or .png)");
}

void write_pgm(const GrayImage& img, const std::string& path, int maxval,
               const std::string& comment) {
    validate_image(img);
    if (maxval < 1 || maxval > 65535) throw ValidationError("PGM maxval must be in [1, 65535]");
    std::ostringstream out;
    out << "P5\n";
    if (!comment.empty()) out << "# " << comment << "\n";
    out << img.width << " " << img.height << "\n" << maxval << "\n";
    const int bytes = maxval > 255 ? 2 : 1;
    std::string payload;
    payload.reserve(img.size() * bytes);
    for (const double p : img.pixels) {
        const double clipped = std::clamp(p, 0.0, 1.0);
        const unsigned v = static_cast<unsigned>(std::lround(clipped * maxval));
        if (bytes == 2) payload.push_back(static_cast<char>(v >> 8));
        payload.push_back(static_cast<char>(v & 0xFF));
    }
    out << payload;

    // Local atomic write; modelio offers the same for text artifacts.
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec) throw IoError("cannot create directory '" + parent.string() + "'");
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write '" + tmp + "'");
        const std::string s = out.str();
        f.write(s.data(), static_cast<std::streamsize>(s.size()));
        if (!f) throw IoError("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace texturekit
