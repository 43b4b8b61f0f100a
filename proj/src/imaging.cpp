#include "texclass/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "texclass/error.hpp"

namespace texclass::imaging {

namespace {

class NetpbmReader {
public:
    explicit NetpbmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P') {
            fail("magic number", 0);
        }
        const char kind = static_cast<char>(bytes_[1]);
        if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
            fail("magic number", 0);
        }
        pos_ = 2;
        return {'P', kind};
    }

    // Header and ASCII-sample integer; skips whitespace and '#' comments.
    std::uint64_t integer(const char* field) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        token_start_ = start;
        std::uint64_t value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFull) {
                fail(field, start);
            }
            ++pos_;
        }
        if (pos_ == start) {
            fail(field, start);
        }
        if (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') {
            fail(field, start);
        }
        return value;
    }

    // Binary payload starts after exactly one whitespace byte following max_value.
    void begin_raster() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            fail("raster separator", pos_);
        }
        ++pos_;
    }

    std::uint32_t raw_sample(std::uint32_t max_value, const char* field) {
        const std::size_t width = max_value < 256 ? 1 : 2;
        if (pos_ + width > bytes_.size()) {
            fail(field, pos_, "truncated data");
        }
        std::uint32_t v = bytes_[pos_];
        if (width == 2) {
            v = (v << 8) | bytes_[pos_ + 1];
        }
        pos_ += width;
        return v;
    }

    std::size_t offset() const { return pos_; }
    // Start of the most recent integer token.
    std::size_t token_start() const { return token_start_; }

    [[noreturn]] void fail(const char* field, std::size_t at, const char* what = "invalid") const {
        std::ostringstream msg;
        msg << "netpbm: " << what << " " << field << " at byte offset " << at;
        throw ParseError(msg.str());
    }

private:
    static bool is_space(std::uint8_t c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
        if (pos_ >= bytes_.size()) {
            fail("field", pos_, "truncated data before");
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::size_t token_start_ = 0;
};

std::uint32_t checked_sample(NetpbmReader& in, bool ascii, std::uint32_t max_value) {
    std::size_t at = in.offset();
    const std::uint64_t v = ascii ? in.integer("sample") : in.raw_sample(max_value, "sample");
    if (ascii) at = in.token_start();
    if (v > max_value) {
        in.fail("sample (exceeds max_value)", at);
    }
    return static_cast<std::uint32_t>(v);
}

void write_header(std::ostringstream& out, char kind, std::size_t w, std::size_t h, std::uint32_t max_value) {
    out << 'P' << kind << '\n' << w << ' ' << h << '\n' << max_value << '\n';
}

void write_binary_sample(std::ostringstream& out, std::uint32_t v, std::uint32_t max_value) {
    if (max_value >= 256) {
        out.put(static_cast<char>((v >> 8) & 0xFF));
    }
    out.put(static_cast<char>(v & 0xFF));
}

}  // namespace

Image parse_image(std::span<const std::uint8_t> bytes) {
    NetpbmReader in(bytes);
    const std::string magic = in.magic();
    const bool ascii = magic == "P2" || magic == "P3";
    const bool color = magic == "P3" || magic == "P6";

    const auto width = in.integer("width");
    if (width == 0) in.fail("width", in.token_start());
    const auto height = in.integer("height");
    if (height == 0) in.fail("height", in.token_start());
    const auto max_value = in.integer("max_value");
    if (max_value == 0 || max_value > 65535) {
        in.fail("max_value", in.token_start());
    }
    if (!ascii) {
        in.begin_raster();
    }
    const auto maxv = static_cast<std::uint32_t>(max_value);
    const std::size_t count = width * height;

    if (color) {
        RgbImage img{width, height, maxv, {}};
        img.data.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            Rgb px;
            px.r = static_cast<std::uint16_t>(checked_sample(in, ascii, maxv));
            px.g = static_cast<std::uint16_t>(checked_sample(in, ascii, maxv));
            px.b = static_cast<std::uint16_t>(checked_sample(in, ascii, maxv));
            img.data.push_back(px);
        }
        return img;
    }
    GrayImage img{width, height, maxv, {}};
    img.data.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        img.data.push_back(static_cast<std::uint16_t>(checked_sample(in, ascii, maxv)));
    }
    return img;
}

Image parse_image(std::string_view bytes) {
    return parse_image(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

Image read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open image " + path.string());
    }
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return parse_image(std::string_view(bytes));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string serialize(const GrayImage& img, Encoding enc) {
    std::ostringstream out;
    write_header(out, enc == Encoding::Ascii ? '2' : '5', img.width, img.height, img.max_value);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        if (enc == Encoding::Ascii) {
            out << img.data[i] << ((i + 1) % img.width == 0 ? '\n' : ' ');
        } else {
            write_binary_sample(out, img.data[i], img.max_value);
        }
    }
    return out.str();
}

std::string serialize(const RgbImage& img, Encoding enc) {
    std::ostringstream out;
    write_header(out, enc == Encoding::Ascii ? '3' : '6', img.width, img.height, img.max_value);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const Rgb& px = img.data[i];
        if (enc == Encoding::Ascii) {
            out << px.r << ' ' << px.g << ' ' << px.b << ((i + 1) % img.width == 0 ? '\n' : ' ');
        } else {
            write_binary_sample(out, px.r, img.max_value);
            write_binary_sample(out, px.g, img.max_value);
            write_binary_sample(out, px.b, img.max_value);
        }
    }
    return out.str();
}

void write_image(const std::filesystem::path& path, const GrayImage& img, Encoding enc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write image " + path.string());
    }
    const std::string bytes = serialize(img, enc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage gray{img.width, img.height, img.max_value, {}};
    gray.data.reserve(img.data.size());
    for (const Rgb& px : img.data) {
        const double luma = 0.299 * px.r + 0.587 * px.g + 0.114 * px.b;
        double v = std::round(luma);
        v = std::clamp(v, 0.0, static_cast<double>(img.max_value));
        gray.data.push_back(static_cast<std::uint16_t>(v));
    }
    return gray;
}

GrayImage as_gray(const Image& img) {
    if (const auto* g = std::get_if<GrayImage>(&img)) {
        return *g;
    }
    return to_grayscale(std::get<RgbImage>(img));
}

std::vector<Block> partition_blocks(const GrayImage& img, std::size_t n) {
    if (n < 2) {
        throw Error("block size must be at least 2");
    }
    if (img.width < n || img.height < n) {
        throw Error("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " is smaller than one " + std::to_string(n) + "x" + std::to_string(n) + " block");
    }
    const std::size_t cols = img.width / n;
    const std::size_t rows = img.height / n;
    const std::size_t x0 = (img.width - cols * n) / 2;
    const std::size_t y0 = (img.height - rows * n) / 2;

    std::vector<Block> blocks;
    blocks.reserve(rows * cols);
    for (std::size_t by = 0; by < rows; ++by) {
        for (std::size_t bx = 0; bx < cols; ++bx) {
            Block b{n, std::vector<double>(n * n)};
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    b.values[i * n + j] = img.at(x0 + bx * n + j, y0 + by * n + i);
                }
            }
            blocks.push_back(std::move(b));
        }
    }
    return blocks;
}

GrayImage assemble_blocks(std::span<const Block> blocks, std::size_t blocks_per_row, std::uint32_t max_value) {
    if (blocks.empty() || blocks_per_row == 0 || blocks.size() % blocks_per_row != 0) {
        throw Error("block layout does not form a rectangle");
    }
    const std::size_t n = blocks.front().n;
    const std::size_t rows = blocks.size() / blocks_per_row;
    GrayImage img{blocks_per_row * n, rows * n, max_value, {}};
    img.data.assign(img.width * img.height, 0);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const std::size_t bx = k % blocks_per_row;
        const std::size_t by = k / blocks_per_row;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = std::round(blocks[k].values[i * n + j]);
                img.data[(by * n + i) * img.width + bx * n + j] =
                    static_cast<std::uint16_t>(std::clamp(v, 0.0, static_cast<double>(max_value)));
            }
        }
    }
    return img;
}

}  // namespace texclass::imaging
