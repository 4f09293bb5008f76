#ifndef SHADOWCAST_IMAGE_HPP
#define SHADOWCAST_IMAGE_HPP

#include <cstddef>
#include <vector>

namespace shadowcast {

// Dense row-major 2D array of doubles. x = column, y = row.
struct Image2D {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Image2D() = default;
    Image2D(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return v.size(); }
};

}  // namespace shadowcast

#endif
