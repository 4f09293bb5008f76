#include "shadowcast/pgm.hpp"

#include <cctype>
#include <fstream>

#include "shadowcast/errors.hpp"

namespace shadowcast::pgm {

void write_pgm16(const std::string& path, const Pgm16& img) {
    if (img.width <= 0 || img.height <= 0 ||
        img.samples.size() != static_cast<std::size_t>(img.width) * img.height)
        throw io_error("inconsistent PGM dimensions for " + path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << "P5\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
    std::vector<unsigned char> buf(img.samples.size() * 2);
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        buf[2 * i] = static_cast<unsigned char>(img.samples[i] >> 8);  // big-endian
        buf[2 * i + 1] = static_cast<unsigned char>(img.samples[i] & 0xff);
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw io_error("write failed: " + path);
}

namespace {
// Next whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}
}  // namespace

Pgm16 read_pgm16(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    if (next_token(is) != "P5") throw io_error("not a binary PGM (P5): " + path);
    Pgm16 img;
    try {
        img.width = std::stoi(next_token(is));
        img.height = std::stoi(next_token(is));
        const long maxval = std::stol(next_token(is));
        if (maxval < 256 || maxval > 65535)
            throw io_error("expected a 16-bit PGM (maxval in 256..65535): " + path);
        img.maxval = static_cast<std::uint16_t>(maxval);
    } catch (const io_error&) {
        throw;
    } catch (const std::exception&) {
        throw io_error("malformed PGM header: " + path);
    }
    if (img.width <= 0 || img.height <= 0) throw io_error("bad PGM dimensions: " + path);

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    std::vector<unsigned char> buf(n * 2);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(is.gcount()) != buf.size())
        throw io_error("truncated PGM data: " + path);
    img.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        img.samples[i] =
            static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    return img;
}

}  // namespace shadowcast::pgm
