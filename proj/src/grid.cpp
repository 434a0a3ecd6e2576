#include "dirac/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace dirac {

GridSpec::GridSpec(int n_, double length_) : n(n_), length(length_)
{
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("GridSpec: n must be a power of two >= 8");
    if (!(length > 0.0))
        throw std::invalid_argument("GridSpec: period length must be positive");
}

double GridSpec::node_radius(int ix, int iy, int iz) const
{
    auto wrap = [this](int i) {
        int m = signed_index(i);
        return double(std::abs(m));  // |m| <= n/2 already minimal on the torus
    };
    double dx = wrap(ix), dy = wrap(iy), dz = wrap(iz);
    return h() * std::sqrt(dx * dx + dy * dy + dz * dz);
}

int GridSpec::index_of(double c) const
{
    double m = std::round(c / h());
    long im = long(m) % n;
    if (im < 0) im += n;
    return int(im);
}

}  // namespace dirac
