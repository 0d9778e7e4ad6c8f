#pragma once

#include <cstdint>
#include <string>

#include "halfflow/field.hpp"

namespace halfflow {

// Initial-data recipe.  `kind` selects the construction; the numeric
// parameters are read per kind and ignored otherwise:
//   constant                                  fixed unit vector e_1
//   great_circle(k)                           x -> (cos kx, sin kx, 0, ...)
//   bubble_pullback(lambda[, x0])             degree-one bubble pulled back
//                                             through the stereographic chart
//                                             centered at x0, concentration
//                                             scale lambda
//   bandlimited_noise(amplitude, max_mode[, seed])
//   perturbed_constant(amplitude[, seed])     bandlimited noise with the
//                                             band fixed to modes 1..4
// The noise kinds perturb the constant e_1 tangentially with seeded
// Gaussian Fourier coefficients on modes 1..max_mode and renormalize
// pointwise; the construction is grid-independent (the same seed
// defines the same continuum map at every M).
struct InitialDataSpec {
    std::string kind = "constant";
    int n = 2;
    int mode = 1;             // great_circle
    double lambda = 0.1;      // bubble_pullback
    double x0 = 0.0;          // bubble_pullback
    double amplitude = 0.05;  // noise kinds
    int max_mode = 8;         // bandlimited_noise
    std::uint64_t seed = 0;   // noise kinds
};

// Parses "kind" or "kind(a, b, ...)" into a spec with the given target
// dimension and default seed (inline seed argument wins when present).
InitialDataSpec parse_initial_data(const std::string& text, int n,
                                   std::uint64_t default_seed);

// Samples the recipe on the grid; the result is on the sphere to
// round-off.  Throws std::invalid_argument on an unknown kind or
// out-of-range parameters (great_circle and noise bands must stay
// below the Nyquist mode).
Field make_initial(const InitialDataSpec& spec, const CircleGrid& g);

} // namespace halfflow
