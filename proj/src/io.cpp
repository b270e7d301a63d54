// SPDX-License-Identifier: MIT
#include "tensorcs/io.hpp"

#include "tensorcs/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace tensorcs::io {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'T', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(b.data(), b.size());
}

std::uint64_t get_le(std::istream& in, int nbytes) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), nbytes);
    if (!in) throw IoError("DTF1: unexpected end of stream");
    std::uint64_t v = 0;
    for (int i = 0; i < nbytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(c);
    }
    if (tok.empty()) throw IoError("PGM: truncated header");
    return tok;
}

std::size_t parse_size(const std::string& s, const char* what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw IoError(std::string("PGM: bad ") + what);
    return v;
}

}  // namespace

void write_dtf(std::ostream& out, const DenseTensor& x) {
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, static_cast<std::uint32_t>(x.order()));
    for (auto n : x.dims()) put_u32(out, static_cast<std::uint32_t>(n));
    for (double v : x.data()) put_f64(out, v);
    if (!out) throw IoError("DTF1: write failed");
}

DenseTensor read_dtf(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw IoError("DTF1: bad magic");
    const auto d = static_cast<std::size_t>(get_le(in, 4));
    if (d == 0 || d > 8) throw IoError("DTF1: unsupported mode count " + std::to_string(d));
    Dims dims(d);
    for (auto& n : dims) {
        n = static_cast<std::size_t>(get_le(in, 4));
        if (n == 0) throw IoError("DTF1: zero extent");
    }
    std::vector<double> data(element_count(dims));
    for (auto& v : data) v = std::bit_cast<double>(get_le(in, 8));
    return DenseTensor(std::move(dims), std::move(data));
}

void write_dtf(const std::filesystem::path& path, const DenseTensor& x) {
    auto out = open_out(path);
    write_dtf(out, x);
}

DenseTensor read_dtf(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_dtf(in);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), p};
}

void write_csv(std::ostream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Matrix read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto first = cell.find_first_not_of(" \t");
            const auto last = cell.find_last_not_of(" \t");
            if (first == std::string::npos) throw IoError("CSV: empty cell");
            cell = cell.substr(first, last - first + 1);
            double v = 0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size()) throw IoError("CSV: bad number '" + cell + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw IoError("CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("CSV: no data");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_out(path);
    write_csv(out, m);
}

Matrix read_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_csv(in);
}

DenseTensor read_pgm(const std::filesystem::path& path) {
    auto in = open_in(path);
    if (pgm_token(in) != "P5") throw IoError("PGM: only binary P5 is supported");
    const auto width = parse_size(pgm_token(in), "width");
    const auto height = parse_size(pgm_token(in), "height");
    const auto maxval = parse_size(pgm_token(in), "maxval");
    if (width == 0 || height == 0) throw IoError("PGM: empty image");
    if (maxval == 0 || maxval > 255) throw IoError("PGM: only 8-bit images are supported");
    std::vector<unsigned char> pixels(width * height);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!in) throw IoError("PGM: truncated pixel data");
    DenseTensor img({height, width});
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) img.at({r, c}) = pixels[r * width + c];
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const DenseTensor& image) {
    if (image.order() != 2) throw InvalidArgument("write_pgm: need a 2-mode tensor");
    auto out = open_out(path);
    const auto height = image.dim(0);
    const auto width = image.dim(1);
    out << "P5\n" << width << ' ' << height << "\n255\n";
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const double v = std::clamp(std::round(image.at({r, c})), 0.0, 255.0);
            out.put(static_cast<char>(static_cast<unsigned char>(v)));
        }
    }
    if (!out) throw IoError("PGM: write failed");
}

DenseTensor read_pgm_frames(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    if (files.empty()) throw IoError("no .pgm frames in " + dir.string());
    std::sort(files.begin(), files.end());
    const auto first = read_pgm(files.front());
    const auto rows = first.dim(0);
    const auto cols = first.dim(1);
    DenseTensor video({rows, cols, files.size()});
    for (std::size_t f = 0; f < files.size(); ++f) {
        const auto frame = f == 0 ? first : read_pgm(files[f]);
        if (frame.dims() != first.dims()) throw IoError("frame size mismatch in " + files[f].string());
        std::copy(frame.data().begin(), frame.data().end(), video.data().begin() + static_cast<std::ptrdiff_t>(f * rows * cols));
    }
    return video;
}

DenseTensor read_signal(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return read_pgm_frames(path);
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    if (path.extension() == ".pgm") return read_pgm(path);
    if (path.extension() == ".csv") return DenseTensor::from_matrix(read_csv(path));
    return read_dtf(path);
}

}  // namespace tensorcs::io
