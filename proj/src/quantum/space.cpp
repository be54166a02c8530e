#include "molspec/quantum/space.hpp"

#include <string>

#include "molspec/core/errors.hpp"

namespace molspec::quantum {

CompositeSpace::CompositeSpace(int n_modes) : n_modes_(n_modes) {
    if (n_modes < 0) throw InvalidArgument("n_modes must be non-negative");
    if (n_modes > kMaxModes)
        throw InvalidArgument("n_modes = " + std::to_string(n_modes) + " exceeds the dimension guard of " +
                              std::to_string(kMaxModes));
}

BasisLabel CompositeSpace::label(std::size_t index) const {
    if (index >= dim()) throw InvalidArgument("basis index out of range");
    BasisLabel out;
    out.tls = static_cast<int>(index >> n_modes_);
    out.occupations.resize(static_cast<std::size_t>(n_modes_));
    for (int i = 0; i < n_modes_; ++i) out.occupations[static_cast<std::size_t>(i)] = static_cast<int>((index >> (n_modes_ - 1 - i)) & 1U);
    return out;
}

std::size_t CompositeSpace::index(const BasisLabel& label) const {
    if (label.tls < 0 || label.tls > 1) throw InvalidArgument("TLS level must be 0 or 1");
    if (label.occupations.size() != static_cast<std::size_t>(n_modes_)) throw InvalidArgument("occupation count does not match n_modes");
    std::size_t out = static_cast<std::size_t>(label.tls);
    for (int occ : label.occupations) {
        if (occ < 0 || occ >= kLevelsPerMode) throw InvalidArgument("mode occupation out of range");
        out = (out << 1) | static_cast<std::size_t>(occ);
    }
    return out;
}

CompositeSpace build_space(int n_modes) { return CompositeSpace(n_modes); }

}  // namespace molspec::quantum
