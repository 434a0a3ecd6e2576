#pragma once

#include <cstddef>
#include <vector>

#include "dirac/linalg.hpp"

namespace dirac {

// Periodic cube [-L/2, L/2)^3 sampled at n points per axis, stored in
// FFT-natural order: index i along an axis maps to the signed lattice
// coordinate (i < n/2 ? i : i - n) * h, so the origin sits at index 0.
struct GridSpec {
    int n = 64;
    double length = 64.0;

    GridSpec() = default;
    GridSpec(int n_, double length_);

    double h() const { return length / n; }
    std::size_t size() const { return std::size_t(n) * n * n; }

    // Signed integer coordinate of axis index i, in units of h.
    int signed_index(int i) const { return i < n / 2 ? i : i - n; }
    double coord(int i) const { return signed_index(i) * h(); }
    // Wave number of axis index i: 2*pi*m/L with m in [-n/2, n/2).
    double wavenumber(int i) const { return 6.283185307179586476925286766559 * signed_index(i) / length; }

    std::size_t linear(int ix, int iy, int iz) const
    {
        return (std::size_t(iz) * n + iy) * n + ix;
    }

    Vec3 node(int ix, int iy, int iz) const
    {
        return Vec3(coord(ix), coord(iy), coord(iz));
    }
    Vec3 wavevector(int ix, int iy, int iz) const
    {
        return Vec3(wavenumber(ix), wavenumber(iy), wavenumber(iz));
    }

    // Distance from the origin with periodic wrap (minimum image).
    double node_radius(int ix, int iy, int iz) const;

    // Axis index of the node nearest to physical coordinate c (wrapped).
    int index_of(double c) const;

    bool operator==(const GridSpec& o) const { return n == o.n && length == o.length; }
};

}  // namespace dirac
