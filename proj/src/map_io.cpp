#include "logitcal/map_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "logitcal/records.hpp"

namespace logitcal {

MapFormat parse_map_format(std::string_view s) {
    if (s == "pgm16") return MapFormat::pgm16;
    if (s == "png16") return MapFormat::png16;
    if (s == "csv") return MapFormat::csv;
    throw std::invalid_argument("unknown map format '" + std::string(s) + "' (pgm16, png16, csv)");
}

MapRange occupied_range(const SparseMap& map) {
    bool any = false;
    MapRange r;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (!map.occupancy()[i]) continue;
        double v = map.values()[i];
        if (!any) {
            r = {v, v};
            any = true;
        } else {
            r.min = std::min(r.min, v);
            r.max = std::max(r.max, v);
        }
    }
    return r;
}

std::uint16_t quantize(double v, const MapRange& r) {
    if (!(v >= r.min && v <= r.max))
        throw ValidationError("value " + std::to_string(v) + " outside declared range");
    if (r.max == r.min) return 0;
    double q = std::round((v - r.min) / (r.max - r.min) * 65535.0);
    return static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
}

double dequantize(std::uint16_t q, const MapRange& r) {
    if (q == 0) return r.min;
    if (q == 65535) return r.max;
    return r.min + (r.max - r.min) * (q / 65535.0);
}

std::filesystem::path occupancy_path(const std::filesystem::path& p, MapFormat fmt) {
    auto s = p.string();
    return fmt == MapFormat::png16 ? s + ".occ.png" : s + ".occ.pgm";
}

namespace {

std::string exact(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_exact(const std::string& s, const std::string& what) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("bad " + what + " '" + s + "'");
    return v;
}

std::vector<std::uint16_t> encode(const SparseMap& map, const MapRange& r) {
    std::vector<std::uint16_t> codes(map.size(), 0);
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map.occupancy()[i]) codes[i] = quantize(map.values()[i], r);
    return codes;
}

SparseMap decode(int w, int h, const std::vector<std::uint16_t>& codes,
                 const std::vector<std::uint8_t>& occ, const MapRange& r) {
    SparseMap map(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            auto i = static_cast<std::size_t>(y) * w + x;
            if (occ[i]) map.set(x, y, dequantize(codes[i], r));
        }
    return map;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

// --- PGM -------------------------------------------------------------------

void write_pgm(const std::filesystem::path& p, int w, int h, int maxval, const std::string& comment,
               const std::vector<std::uint16_t>& px) {
    auto out = open_out(p);
    out << "P5\n";
    if (!comment.empty()) out << "# " << comment << '\n';
    out << w << ' ' << h << '\n' << maxval << '\n';
    std::vector<unsigned char> bytes;
    bytes.reserve(px.size() * (maxval > 255 ? 2 : 1));
    for (auto v : px) {
        if (maxval > 255) bytes.push_back(static_cast<unsigned char>(v >> 8));
        bytes.push_back(static_cast<unsigned char>(v & 0xff));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

struct Pgm {
    int width = 0, height = 0, maxval = 0;
    std::vector<std::string> comments;
    std::vector<std::uint16_t> px;
};

Pgm read_pgm(const std::filesystem::path& p) {
    auto in = open_in(p);
    Pgm pgm;
    auto next_token = [&]() {
        std::string tok;
        while (true) {
            int c = in.get();
            if (c == EOF) throw ValidationError(p.string() + ": truncated PGM header");
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                if (!line.empty() && line.front() == ' ') line.erase(0, 1);
                pgm.comments.push_back(line);
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
    };
    if (next_token() != "P5") throw ValidationError(p.string() + ": not a binary PGM");
    pgm.width = std::stoi(next_token());
    pgm.height = std::stoi(next_token());
    pgm.maxval = std::stoi(next_token());
    if (pgm.width < 0 || pgm.height < 0 || pgm.maxval < 1 || pgm.maxval > 65535)
        throw ValidationError(p.string() + ": bad PGM header");
    const auto n = static_cast<std::size_t>(pgm.width) * pgm.height;
    const std::size_t bpp = pgm.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> bytes(n * bpp);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw ValidationError(p.string() + ": truncated PGM payload");
    pgm.px.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        pgm.px[i] = bpp == 2 ? static_cast<std::uint16_t>(bytes[2 * i] << 8 | bytes[2 * i + 1]) : bytes[i];
    return pgm;
}

std::string range_comment(const MapRange& r) {
    return "logitcal-map range_min=" + exact(r.min) + " range_max=" + exact(r.max);
}

MapRange parse_range_comment(const std::vector<std::string>& comments, const std::filesystem::path& p) {
    for (const auto& c : comments) {
        if (!c.starts_with("logitcal-map")) continue;
        std::istringstream ss(c);
        std::string tag, a, b;
        ss >> tag >> a >> b;
        if (!a.starts_with("range_min=") || !b.starts_with("range_max="))
            throw ValidationError(p.string() + ": malformed range comment");
        return {parse_exact(a.substr(10), "range_min"), parse_exact(b.substr(10), "range_max")};
    }
    throw ValidationError(p.string() + ": no declared value range");
}

// --- PNG -------------------------------------------------------------------

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};

// libpng reports errors by longjmp; the setjmp frames below hold no C++ objects.
bool png_write_raw(png_structp png, png_infop info, std::FILE* f, int w, int h, int depth,
                   png_textp text, int num_text, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_init_io(png, f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    if (num_text > 0) png_set_text(png, info, text, num_text);
    png_write_info(png, info);
    if (h > 0 && w > 0) png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

bool png_read_header_raw(png_structp png, png_infop info, std::FILE* f) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_init_io(png, f);
    png_read_info(png, info);
    return true;
}

bool png_read_rows_raw(png_structp png, png_infop info, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_image(png, rows);
    png_read_end(png, info);
    return true;
}

void write_png(const std::filesystem::path& p, int w, int h, int depth,
               const std::vector<std::pair<std::string, std::string>>& text,
               const std::vector<std::uint16_t>& px) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(p.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot write " + p.string());
    PngWriter wr;
    wr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!wr.png) throw std::runtime_error("png_create_write_struct failed");
    wr.info = png_create_info_struct(wr.png);
    if (!wr.info) throw std::runtime_error("png_create_info_struct failed");

    const std::size_t bpp = depth == 16 ? 2 : 1;
    std::vector<unsigned char> rows(static_cast<std::size_t>(w) * h * bpp);
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (bpp == 2) {
            rows[2 * i] = static_cast<unsigned char>(px[i] >> 8);
            rows[2 * i + 1] = static_cast<unsigned char>(px[i] & 0xff);
        } else {
            rows[i] = static_cast<unsigned char>(px[i]);
        }
    }
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) row_ptrs[y] = rows.data() + static_cast<std::size_t>(y) * w * bpp;

    std::vector<png_text> chunks(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        chunks[i] = {};
        chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
        chunks[i].key = const_cast<char*>(text[i].first.c_str());
        chunks[i].text = const_cast<char*>(text[i].second.c_str());
        chunks[i].text_length = text[i].second.size();
    }

    if (!png_write_raw(wr.png, wr.info, f.get(), w, h, depth, chunks.data(), static_cast<int>(chunks.size()),
                       row_ptrs.data()))
        throw std::runtime_error("libpng error writing " + p.string());
}

struct PngImage {
    int width = 0, height = 0, depth = 0;
    std::vector<std::pair<std::string, std::string>> text;
    std::vector<std::uint16_t> px;
};

PngImage read_png(const std::filesystem::path& p) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(p.c_str(), "rb"));
    if (!f) throw std::runtime_error("cannot open " + p.string());
    PngReader rd;
    rd.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!rd.png) throw std::runtime_error("png_create_read_struct failed");
    rd.info = png_create_info_struct(rd.png);
    if (!rd.info) throw std::runtime_error("png_create_info_struct failed");

    PngImage img;
    if (!png_read_header_raw(rd.png, rd.info, f.get()))
        throw ValidationError("libpng error reading " + p.string());
    img.width = static_cast<int>(png_get_image_width(rd.png, rd.info));
    img.height = static_cast<int>(png_get_image_height(rd.png, rd.info));
    img.depth = png_get_bit_depth(rd.png, rd.info);
    if (png_get_color_type(rd.png, rd.info) != PNG_COLOR_TYPE_GRAY || (img.depth != 8 && img.depth != 16))
        throw ValidationError(p.string() + ": expected 8- or 16-bit grayscale PNG");
    const std::size_t bpp = img.depth == 16 ? 2 : 1;
    std::vector<unsigned char> rows(static_cast<std::size_t>(img.width) * img.height * bpp);
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y)
        row_ptrs[y] = rows.data() + static_cast<std::size_t>(y) * img.width * bpp;
    if (!png_read_rows_raw(rd.png, rd.info, row_ptrs.data()))
        throw ValidationError("libpng error reading " + p.string());

    png_textp text = nullptr;
    int num_text = 0;
    png_get_text(rd.png, rd.info, &text, &num_text);
    for (int i = 0; i < num_text; ++i) img.text.emplace_back(text[i].key, text[i].text);

    const auto n = static_cast<std::size_t>(img.width) * img.height;
    img.px.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        img.px[i] = bpp == 2 ? static_cast<std::uint16_t>(rows[2 * i] << 8 | rows[2 * i + 1]) : rows[i];
    return img;
}

std::vector<std::uint16_t> occupancy_pixels(const SparseMap& map) {
    std::vector<std::uint16_t> px(map.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = map.occupancy()[i] ? 255 : 0;
    return px;
}

std::vector<std::uint8_t> occupancy_from(const std::vector<std::uint16_t>& px) {
    std::vector<std::uint8_t> occ(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) occ[i] = px[i] ? 1 : 0;
    return occ;
}

// --- CSV -------------------------------------------------------------------

void write_csv_map(const SparseMap& map, const std::filesystem::path& p) {
    std::ostringstream buf;
    buf << "# logitcal-map width=" << map.width() << " height=" << map.height() << '\n';
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (x) buf << ',';
            if (map.occupied(x, y)) buf << exact(map.value(x, y));
        }
        buf << '\n';
    }
    auto out = open_out(p);
    out << buf.str();
}

MapFile read_csv_map(const std::filesystem::path& p) {
    auto in = open_in(p);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(p.string() + ": empty map file");
    int w = -1, h = -1;
    if (std::sscanf(line.c_str(), "# logitcal-map width=%d height=%d", &w, &h) != 2 || w < 0 || h < 0)
        throw ValidationError(p.string() + ": missing map header");
    SparseMap map(w, h);
    for (int y = 0; y < h; ++y) {
        if (!std::getline(in, line)) throw ParseError(static_cast<std::size_t>(y) + 2, "missing map row");
        std::size_t start = 0;
        for (int x = 0; x < w; ++x) {
            auto end = line.find(',', start);
            if ((end == std::string::npos) != (x == w - 1))
                throw ParseError(static_cast<std::size_t>(y) + 2, "expected " + std::to_string(w) + " cells");
            auto cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
            if (!cell.empty()) map.set(x, y, parse_exact(cell, "map value"));
            start = end + 1;
        }
    }
    return {map, occupied_range(map)};
}

}  // namespace

void write_map(const SparseMap& map, const std::filesystem::path& p, MapFormat fmt,
               std::optional<MapRange> range) {
    MapRange r = range.value_or(occupied_range(map));
    if (!(r.max >= r.min) || !std::isfinite(r.min) || !std::isfinite(r.max))
        throw std::invalid_argument("declared map range must satisfy min <= max");
    switch (fmt) {
    case MapFormat::pgm16:
        write_pgm(p, map.width(), map.height(), 65535, range_comment(r), encode(map, r));
        write_pgm(occupancy_path(p, fmt), map.width(), map.height(), 255, "logitcal-occupancy",
                  occupancy_pixels(map));
        break;
    case MapFormat::png16:
        write_png(p, map.width(), map.height(), 16,
                  {{"logitcal.range_min", exact(r.min)}, {"logitcal.range_max", exact(r.max)}},
                  encode(map, r));
        write_png(occupancy_path(p, fmt), map.width(), map.height(), 8, {}, occupancy_pixels(map));
        break;
    case MapFormat::csv:
        write_csv_map(map, p);
        break;
    }
}

MapFile read_map(const std::filesystem::path& p, MapFormat fmt) {
    switch (fmt) {
    case MapFormat::pgm16: {
        auto img = read_pgm(p);
        auto occ = read_pgm(occupancy_path(p, fmt));
        if (occ.width != img.width || occ.height != img.height)
            throw ValidationError(p.string() + ": occupancy sidecar size mismatch");
        auto r = parse_range_comment(img.comments, p);
        return {decode(img.width, img.height, img.px, occupancy_from(occ.px), r), r};
    }
    case MapFormat::png16: {
        auto img = read_png(p);
        auto occ = read_png(occupancy_path(p, fmt));
        if (occ.width != img.width || occ.height != img.height)
            throw ValidationError(p.string() + ": occupancy sidecar size mismatch");
        std::optional<double> lo, hi;
        for (const auto& [k, v] : img.text) {
            if (k == "logitcal.range_min") lo = parse_exact(v, "range_min");
            if (k == "logitcal.range_max") hi = parse_exact(v, "range_max");
        }
        if (!lo || !hi) throw ValidationError(p.string() + ": no declared value range");
        MapRange r{*lo, *hi};
        return {decode(img.width, img.height, img.px, occupancy_from(occ.px), r), r};
    }
    case MapFormat::csv:
        return read_csv_map(p);
    }
    throw std::invalid_argument("unknown map format");
}

}  // namespace logitcal
