#pragma once

// Generated by tools/gen_utci_coefficients.py. Do not edit.
//
// Operational UTCI polynomial approximation (Broede et al. 2012,
// UTCI_a002.f90). UTCI = Ta + sum(c * Ta^i * va^j * dTmrt^k * Pa^l) with
// va the 10 m wind (m/s), dTmrt = Tmrt - Ta and Pa the vapour pressure in kPa.
// Terms are ordered by (l, k, j, i) as in the reference Fortran source.

#include <array>
#include <cstdint>

namespace utcimap::thermal::detail {

struct UtciTerm {
  double coefficient;
  std::uint8_t ta, va, dmrt, pa;
};

inline constexpr std::array<UtciTerm, 210> kUtciTerms{{
    {6.07562052e-1, 0, 0, 0, 0},
    {-2.27712343e-2, 1, 0, 0, 0},
    {8.06470249e-4, 2, 0, 0, 0},
    {-1.54271372e-4, 3, 0, 0, 0},
    {-3.24651735e-6, 4, 0, 0, 0},
    {7.32602852e-8, 5, 0, 0, 0},
    {1.35959073e-9, 6, 0, 0, 0},
    {-2.25836520e+0, 0, 1, 0, 0},
    {8.80326035e-2, 1, 1, 0, 0},
    {2.16844454e-3, 2, 1, 0, 0},
    {-1.53347087e-5, 3, 1, 0, 0},
    {-5.72983704e-7, 4, 1, 0, 0},
    {-2.55090145e-9, 5, 1, 0, 0},
    {-7.51269505e-1, 0, 2, 0, 0},
    {-4.08350271e-3, 1, 2, 0, 0},
    {-5.21670675e-5, 2, 2, 0, 0},
    {1.94544667e-6, 3, 2, 0, 0},
    {1.14099531e-8, 4, 2, 0, 0},
    {1.58137256e-1, 0, 3, 0, 0},
    {-6.57263143e-5, 1, 3, 0, 0},
    {2.22697524e-7, 2, 3, 0, 0},
    {-4.16117031e-8, 3, 3, 0, 0},
    {-1.27762753e-2, 0, 4, 0, 0},
    {9.66891875e-6, 1, 4, 0, 0},
    {2.52785852e-9, 2, 4, 0, 0},
    {4.56306672e-4, 0, 5, 0, 0},
    {-1.74202546e-7, 1, 5, 0, 0},
    {-5.91491269e-6, 0, 6, 0, 0},
    {3.98374029e-1, 0, 0, 1, 0},
    {1.83945314e-4, 1, 0, 1, 0},
    {-1.73754510e-4, 2, 0, 1, 0},
    {-7.60781159e-7, 3, 0, 1, 0},
    {3.77830287e-8, 4, 0, 1, 0},
    {5.43079673e-10, 5, 0, 1, 0},
    {-2.00518269e-2, 0, 1, 1, 0},
    {8.92859837e-4, 1, 1, 1, 0},
    {3.45433048e-6, 2, 1, 1, 0},
    {-3.77925774e-7, 3, 1, 1, 0},
    {-1.69699377e-9, 4, 1, 1, 0},
    {1.69992415e-4, 0, 2, 1, 0},
    {-4.99204314e-5, 1, 2, 1, 0},
    {2.47417178e-7, 2, 2, 1, 0},
    {1.07596466e-8, 3, 2, 1, 0},
    {8.49242932e-5, 0, 3, 1, 0},
    {1.35191328e-6, 1, 3, 1, 0},
    {-6.21531254e-9, 2, 3, 1, 0},
    {-4.99410301e-6, 0, 4, 1, 0},
    {-1.89489258e-8, 1, 4, 1, 0},
    {8.15300114e-8, 0, 5, 1, 0},
    {7.55043090e-4, 0, 0, 2, 0},
    {-5.65095215e-5, 1, 0, 2, 0},
    {-4.52166564e-7, 2, 0, 2, 0},
    {2.46688878e-8, 3, 0, 2, 0},
    {2.42674348e-10, 4, 0, 2, 0},
    {1.54547250e-4, 0, 1, 2, 0},
    {5.24110970e-6, 1, 1, 2, 0},
    {-8.75874982e-8, 2, 1, 2, 0},
    {-1.50743064e-9, 3, 1, 2, 0},
    {-1.56236307e-5, 0, 2, 2, 0},
    {-1.33895614e-7, 1, 2, 2, 0},
    {2.49709824e-9, 2, 2, 2, 0},
    {6.51711721e-7, 0, 3, 2, 0},
    {1.94960053e-9, 1, 3, 2, 0},
    {-1.00361113e-8, 0, 4, 2, 0},
    {-1.21206673e-5, 0, 0, 3, 0},
    {-2.18203660e-7, 1, 0, 3, 0},
    {7.51269482e-9, 2, 0, 3, 0},
    {9.79063848e-11, 3, 0, 3, 0},
    {1.25006734e-6, 0, 1, 3, 0},
    {-1.81584736e-9, 1, 1, 3, 0},
    {-3.52197671e-10, 2, 1, 3, 0},
    {-3.36514630e-8, 0, 2, 3, 0},
    {1.35908359e-10, 1, 2, 3, 0},
    {4.17032620e-10, 0, 3, 3, 0},
    {-1.30369025e-9, 0, 0, 4, 0},
    {4.13908461e-10, 1, 0, 4, 0},
    {9.22652254e-12, 2, 0, 4, 0},
    {-5.08220384e-9, 0, 1, 4, 0},
    {-2.24730961e-11, 1, 1, 4, 0},
    {1.17139133e-10, 0, 2, 4, 0},
    {6.62154879e-10, 0, 0, 5, 0},
    {4.03863260e-13, 1, 0, 5, 0},
    {1.95087203e-12, 0, 1, 5, 0},
    {-4.73602469e-12, 0, 0, 6, 0},
    {5.12733497e+0, 0, 0, 0, 1},
    {-3.12788561e-1, 1, 0, 0, 1},
    {-1.96701861e-2, 2, 0, 0, 1},
    {9.99690870e-4, 3, 0, 0, 1},
    {9.51738512e-6, 4, 0, 0, 1},
    {-4.66426341e-7, 5, 0, 0, 1},
    {5.48050612e-1, 0, 1, 0, 1},
    {-3.30552823e-3, 1, 1, 0, 1},
    {-1.64119440e-3, 2, 1, 0, 1},
    {-5.16670694e-6, 3, 1, 0, 1},
    {9.52692432e-7, 4, 1, 0, 1},
    {-4.29223622e-2, 0, 2, 0, 1},
    {5.00845667e-3, 1, 2, 0, 1},
    {1.00601257e-6, 2, 2, 0, 1},
    {-1.81748644e-6, 3, 2, 0, 1},
    {-1.25813502e-3, 0, 3, 0, 1},
    {-1.79330391e-4, 1, 3, 0, 1},
    {2.34994441e-6, 2, 3, 0, 1},
    {1.29735808e-4, 0, 4, 0, 1},
    {1.29064870e-6, 1, 4, 0, 1},
    {-2.28558686e-6, 0, 5, 0, 1},
    {-3.69476348e-2, 0, 0, 1, 1},
    {1.62325322e-3, 1, 0, 1, 1},
    {-3.14279680e-5, 2, 0, 1, 1},
    {2.59835559e-6, 3, 0, 1, 1},
    {-4.77136523e-8, 4, 0, 1, 1},
    {8.64203390e-3, 0, 1, 1, 1},
    {-6.87405181e-4, 1, 1, 1, 1},
    {-9.13863872e-6, 2, 1, 1, 1},
    {5.15916806e-7, 3, 1, 1, 1},
    {-3.59217476e-5, 0, 2, 1, 1},
    {3.28696511e-5, 1, 2, 1, 1},
    {-7.10542454e-7, 2, 2, 1, 1},
    {-1.24382300e-5, 0, 3, 1, 1},
    {-7.38584400e-9, 1, 3, 1, 1},
    {2.20609296e-7, 0, 4, 1, 1},
    {-7.32469180e-4, 0, 0, 2, 1},
    {-1.87381964e-5, 1, 0, 2, 1},
    {4.80925239e-6, 2, 0, 2, 1},
    {-8.75492040e-8, 3, 0, 2, 1},
    {2.77862930e-5, 0, 1, 2, 1},
    {-5.06004592e-6, 1, 1, 2, 1},
    {1.14325367e-7, 2, 1, 2, 1},
    {2.53016723e-6, 0, 2, 2, 1},
    {-1.72857035e-8, 1, 2, 2, 1},
    {-3.95079398e-8, 0, 3, 2, 1},
    {-3.59413173e-7, 0, 0, 3, 1},
    {7.04388046e-7, 1, 0, 3, 1},
    {-1.89309167e-8, 2, 0, 3, 1},
    {-4.79768731e-7, 0, 1, 3, 1},
    {7.96079978e-9, 1, 1, 3, 1},
    {1.62897058e-9, 0, 2, 3, 1},
    {3.94367674e-8, 0, 0, 4, 1},
    {-1.18566247e-9, 1, 0, 4, 1},
    {3.34678041e-10, 0, 1, 4, 1},
    {-1.15606447e-10, 0, 0, 5, 1},
    {-2.80626406e+0, 0, 0, 0, 2},
    {5.48712484e-1, 1, 0, 0, 2},
    {-3.99428410e-3, 2, 0, 0, 2},
    {-9.54009191e-4, 3, 0, 0, 2},
    {1.93090978e-5, 4, 0, 0, 2},
    {-3.08806365e-1, 0, 1, 0, 2},
    {1.16952364e-2, 1, 1, 0, 2},
    {4.95271903e-4, 2, 1, 0, 2},
    {-1.90710882e-5, 3, 1, 0, 2},
    {2.10787756e-3, 0, 2, 0, 2},
    {-6.98445738e-4, 1, 2, 0, 2},
    {2.30109073e-5, 2, 2, 0, 2},
    {4.17856590e-4, 0, 3, 0, 2},
    {-1.27043871e-5, 1, 3, 0, 2},
    {-3.04620472e-6, 0, 4, 0, 2},
    {5.14507424e-2, 0, 0, 1, 2},
    {-4.32510997e-3, 1, 0, 1, 2},
    {8.99281156e-5, 2, 0, 1, 2},
    {-7.14663943e-7, 3, 0, 1, 2},
    {-2.66016305e-4, 0, 1, 1, 2},
    {2.63789586e-4, 1, 1, 1, 2},
    {-7.01199003e-6, 2, 1, 1, 2},
    {-1.06823306e-4, 0, 2, 1, 2},
    {3.61341136e-6, 1, 2, 1, 2},
    {2.29748967e-7, 0, 3, 1, 2},
    {3.04788893e-4, 0, 0, 2, 2},
    {-6.42070836e-5, 1, 0, 2, 2},
    {1.16257971e-6, 2, 0, 2, 2},
    {7.68023384e-6, 0, 1, 2, 2},
    {-5.47446896e-7, 1, 1, 2, 2},
    {-3.59937910e-8, 0, 2, 2, 2},
    {-4.36497725e-6, 0, 0, 3, 2},
    {1.68737969e-7, 1, 0, 3, 2},
    {2.67489271e-8, 0, 1, 3, 2},
    {3.23926897e-9, 0, 0, 4, 2},
    {-3.53874123e-2, 0, 0, 0, 3},
    {-2.21201190e-1, 1, 0, 0, 3},
    {1.55126038e-2, 2, 0, 0, 3},
    {-2.63917279e-4, 3, 0, 0, 3},
    {4.53433455e-2, 0, 1, 0, 3},
    {-4.32943862e-3, 1, 1, 0, 3},
    {1.45389826e-4, 2, 1, 0, 3},
    {2.17508610e-4, 0, 2, 0, 3},
    {-6.66724702e-5, 1, 2, 0, 3},
    {3.33217140e-5, 0, 3, 0, 3},
    {-2.26921615e-3, 0, 0, 1, 3},
    {3.80261982e-4, 1, 0, 1, 3},
    {-5.45314314e-9, 2, 0, 1, 3},
    {-7.96355448e-4, 0, 1, 1, 3},
    {2.53458034e-5, 1, 1, 1, 3},
    {-6.31223658e-6, 0, 2, 1, 3},
    {3.02122035e-4, 0, 0, 2, 3},
    {-4.77403547e-6, 1, 0, 2, 3},
    {1.73825715e-6, 0, 1, 2, 3},
    {-4.09087898e-7, 0, 0, 3, 3},
    {6.14155345e-1, 0, 0, 0, 4},
    {-6.16755931e-2, 1, 0, 0, 4},
    {1.33374846e-3, 2, 0, 0, 4},
    {3.55375387e-3, 0, 1, 0, 4},
    {-5.13027851e-4, 1, 1, 0, 4},
    {1.02449757e-4, 0, 2, 0, 4},
    {-1.48526421e-3, 0, 0, 1, 4},
    {-4.11469183e-5, 1, 0, 1, 4},
    {-6.80434415e-6, 0, 1, 1, 4},
    {-9.77675906e-6, 0, 0, 2, 4},
    {8.82773108e-2, 0, 0, 0, 5},
    {-3.01859306e-3, 1, 0, 0, 5},
    {1.04452989e-3, 0, 1, 0, 5},
    {2.47090539e-4, 0, 0, 1, 5},
    {1.48348065e-3, 0, 0, 0, 6},
}};

inline constexpr std::uint64_t kUtciTermsChecksum = 0x46A9F417A4700527ULL;

}  // namespace utcimap::thermal::detail
