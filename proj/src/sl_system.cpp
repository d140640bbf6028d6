#include "otsuki/sl_system.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "otsuki/errors.hpp"

namespace otsuki {

std::string to_string(BoundaryKind kind)
{
    switch (kind) {
    case BoundaryKind::Periodic:
        return "periodic";
    case BoundaryKind::Antiperiodic:
        return "antiperiodic";
    case BoundaryKind::Twisted:
        return "twisted";
    case BoundaryKind::Dirichlet:
        return "dirichlet";
    }
    return "unknown";
}

BoundaryCondition BoundaryCondition::twisted(cplx omega, int index)
{
    if (std::abs(std::abs(omega) - 1.0) > 1e-12)
        throw ValidationError("twist factor omega must have modulus 1");
    return {BoundaryKind::Twisted, omega, index};
}

BoundaryCondition BoundaryCondition::root_of_unity(int r, int q)
{
    if (q <= 0)
        throw ValidationError("q must be positive");
    if (r < 0 || r >= 2 * q)
        throw ValidationError("omega index must lie in [0, 2q)");
    const double angle = std::numbers::pi * r / q;
    return {BoundaryKind::Twisted, std::polar(1.0, angle), r};
}

std::array<cplx, 2> BoundaryCondition::channel_phases(int dim) const
{
    switch (kind) {
    case BoundaryKind::Periodic:
        return {cplx{1.0}, cplx{1.0}};
    case BoundaryKind::Antiperiodic:
        return {cplx{-1.0}, cplx{-1.0}};
    case BoundaryKind::Twisted:
        return {omega, dim == 2 ? -omega : omega};
    case BoundaryKind::Dirichlet:
        break;
    }
    return {cplx{0.0}, cplx{0.0}};
}

bool BoundaryCondition::real_phases(int dim) const
{
    if (kind != BoundaryKind::Twisted)
        return true;
    (void)dim;
    return std::abs(omega.imag()) < 1e-15;
}

void SLSystem::validate() const
{
    if (dim != 1 && dim != 2)
        throw ValidationError("system dimension must be 1 or 2");
    if (!(length > 0.0))
        throw ValidationError("interval length must be positive");
    const std::size_t n = weight.size();
    if (n < 3)
        throw ValidationError("need at least two sample intervals");
    if (q11.size() != n || (dim == 2 && (q12.size() != n || q22.size() != n)))
        throw ValidationError("coefficient sample counts differ");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(weight[k] > 0.0) || !std::isfinite(weight[k])) {
            std::ostringstream msg;
            msg << "weight p must be positive; sample " << k << " is " << weight[k];
            throw ValidationError(msg.str());
        }
        const bool finite = std::isfinite(q11[k]) &&
                            (dim == 1 || (std::isfinite(q12[k]) && std::isfinite(q22[k])));
        if (!finite)
            throw ValidationError("coefficients must be finite");
    }
    if (bc.kind == BoundaryKind::Twisted && std::abs(std::abs(bc.omega) - 1.0) > 1e-12)
        throw ValidationError("twist factor omega must have modulus 1");
}

} // namespace otsuki
