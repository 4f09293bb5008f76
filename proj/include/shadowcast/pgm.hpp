#ifndef SHADOWCAST_PGM_HPP
#define SHADOWCAST_PGM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace shadowcast::pgm {

struct Pgm16 {
    int width = 0;
    int height = 0;
    std::uint16_t maxval = 65535;
    std::vector<std::uint16_t> samples;  // row-major
};

// Binary P5, 16-bit big-endian sample order. Round-trips bit-exactly.
void write_pgm16(const std::string& path, const Pgm16& img);
Pgm16 read_pgm16(const std::string& path);

}  // namespace shadowcast::pgm

#endif
