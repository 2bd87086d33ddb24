"""Phase-space and operator conventions shared by every module.

Quadratures
    X = (a + a^dag) / sqrt(2),  P = i (a^dag - a) / sqrt(2),
    X_theta = (a exp(-i theta) + a^dag exp(i theta)) / sqrt(2).
    The vacuum has V[X] = V[P] = 1/2.  No hbar appears anywhere.

Position-basis wavefunctions
    <x|n> = H_n(x) exp(-x^2/2) / (pi^(1/4) sqrt(2^n n!)),
    <n|x_theta> = exp(i n theta) <n|x>.

Homodyne densities
    pr(x|theta) = sum_{m,n} rho_mn exp(i (n - m) theta) <x|m> <n|x>,
    with the reflection identity pr(x|theta + pi) = pr(-x|theta).

Wigner function
    W(x, p) = (1/pi) Tr[rho D(alpha) Parity D(alpha)^dag],  alpha = (x + i p)/sqrt(2),
    normalised so that the integral over dx dp is 1.  Vacuum: W(0, 0) = 1/pi.

Squeezing
    S(r) = exp(r/2 (a^2 - a^dag^2)).  r > 0 squeezes X ("amplitude squeezed"),
    and S(r)|0> has Fock amplitudes proportional to (-tanh r)^m on |2m>.
    The phase-squeezed state uses (+tanh r)^m.

Decibels
    A squeezing level s dB is stored as a positive number; the squeezed variance
    is 0.5 * 10^(-s/10) and the antisqueezed variance 0.5 * 10^(+a/10).

Cat states
    axis="x": N (|alpha> - |-alpha>), Wigner lobes on the x axis.
    axis="p": N (|i alpha> - |-i alpha>), Wigner lobes on the p axis.
    Photon subtraction from the amplitude-squeezed mode ("c") gives the p-axis
    cat, which the source experiment labels cat_x; the phase-squeezed mode
    ("d") gives the x-axis cat, labelled cat_p there.

Beam splitter
    Heisenberg action a1 -> sqrt(T) a1 + sqrt(1-T) a2,
                     a2 -> sqrt(T) a2 - sqrt(1-T) a1.
    At T = 1/2 output mode 1 is d_+ = (a1 + a2)/sqrt(2) and output mode 2 is
    -d_- = (a2 - a1)/sqrt(2).

Two-mode ordering
    Composite vectors are row-major in (mode 1, mode 2): index = n1 * D + n2.
"""

SQRT2 = 2.0**0.5

VACUUM_VARIANCE = 0.5

#: Levels of the reconstruction Fock space (photon numbers 0..12).
DEFAULT_TOMOGRAPHY_DIM = 13

#: Combined homodyne (0.9) and transmission (0.9) efficiency.
DEFAULT_EFFICIENCY_CORRECTION = 0.81

MODE_LABELS = ("c", "d")

#: Orientation of the squeezed state feeding each mode.
MODE_ORIENTATION = {"c": "amplitude", "d": "phase"}

#: Wigner-lobe axis of the cat expected from each mode.
MODE_CAT_AXIS = {"c": "p", "d": "x"}
