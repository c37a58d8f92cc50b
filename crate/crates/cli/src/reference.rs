//! Published reference values for the twist-knot family `T_1..T_5`.
//!
//! Coefficients are listed from the constant term up. Published decimals
//! are truncated, not rounded.

/// Defining polynomial of `t` for `n = 1..5`.
pub const DEFINING_POLYNOMIALS: [&[i64]; 5] = [
    &[16, -12, 3],
    &[-64, 80, -40, 7],
    &[256, -448, 336, -120, 17],
    &[-2048, 4608, -4608, 2464, -696, 82],
    &[4096, -11264, 14080, -9984, 4192, -980, 99],
];

/// One published row: `t`, `vol` and `cs`, where `V0 = i(vol + i cs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeRow {
    pub t_re: f64,
    pub t_im: f64,
    pub vol: f64,
    pub cs: f64,
}

const fn row(t_re: f64, t_im: f64, vol: f64, cs: f64) -> VolumeRow {
    VolumeRow { t_re, t_im, vol, cs }
}

/// Complex volumes for `n = 1..5`; the first row of each `n` is the
/// geometric one.
pub const COMPLEX_VOLUMES: [&[VolumeRow]; 5] = [
    &[row(2.0, 1.1547, 2.0299, 0.0), row(2.0, -1.1547, -2.0299, 0.0)],
    &[row(1.4587, 1.0682, 2.8281, 3.0241), row(1.4587, -1.0682, -2.8281, 3.0241), row(2.7969, 0.0, 0.0, -1.1135)],
    &[
        row(1.2631, 1.0347, 3.1640, 6.7907),
        row(1.2631, -1.0347, -3.1640, 6.7907),
        row(2.2664, 0.7158, 1.4151, 0.2110),
        row(2.2664, -0.7158, -1.4151, 0.2110),
    ],
    &[
        row(1.1713, 1.0202, 3.3317, 10.9583),
        row(1.1713, -1.0202, -3.3317, 10.9583),
        row(1.8097, 0.9073, 2.2140, 1.8198),
        row(1.8097, -0.9073, -2.2140, 1.8198),
        row(2.5257, 0.0, 0.0, -0.8822),
    ],
    &[
        row(1.1208, 1.0129, 3.4272, 15.3545),
        row(1.1208, -1.0129, -3.4272, 15.3545),
        row(1.5498, 0.9676, 2.6560, 4.6428),
        row(1.5498, -0.9676, -2.6560, 4.6428),
        row(2.2789, 0.4876, 1.1087, -0.2581),
        row(2.2789, -0.4876, -1.1087, -0.2581),
    ],
];

/// `x_k`, `y_k` for `k = 0..5` as (name, numerator, denominator).
pub const RECURSION: [(&str, &[i64], &[i64]); 12] = [
    ("x0", &[0, 1], &[1]),
    ("y0", &[2, 1], &[0, 1]),
    ("x1", &[0, 2, 1], &[8, -4, 1]),
    ("y1", &[4], &[0, 1]),
    ("x2", &[0, -4], &[-16, 16, -7, 1]),
    ("y2", &[32, -16, 2, 1], &[0, 8, -4, 1]),
    ("x3", &[0, 32, -16, 2, 1], &[128, -192, 128, -40, 5]),
    ("y3", &[-64, 64, -24, 0, 1], &[0, -16, 16, -7, 1]),
    ("x4", &[0, -64, 64, -24, 0, 1], &[-256, 512, -464, 224, -57, 6]),
    ("y4", &[512, -768, 480, -112, -6, 5], &[0, 128, -192, 128, -40, 5]),
    ("x5", &[0, 512, -768, 480, -112, -6, 5], &[2048, -5120, 5888, -3840, 1480, -316, 29]),
    ("y5", &[-1024, 2048, -1792, 768, -124, -16, 6], &[0, -256, 512, -464, 224, -57, 6]),
];

/// Volume of the figure-eight knot complement.
pub const FIGURE_EIGHT_VOLUME: f64 = 2.0299;
