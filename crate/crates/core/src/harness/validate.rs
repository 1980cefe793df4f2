//! Golden-value checks on the dipole example and the Clarke channels.

use std::fmt;

use crate::fading::{clarke_correlation, doppler_hz};
use crate::frontend::{compute_f, recover_za};
use crate::numerics::herm_eig_n;
use crate::Cplx;

pub const DIPOLE_ZA: Cplx = Cplx::new(73.0, 42.5);
pub const LOAD_Z1: Cplx = Cplx::new(50.0, 0.0);
pub const LOAD_Z2: Cplx = Cplx::new(60.0, 20.0);
pub const DIPOLE_F: Cplx = Cplx::new(0.9646, -0.1032);
pub const CARRIER_HZ: f64 = 2.1e9;
pub const SUBFRAME_S: f64 = 1e-3;
pub const MODERATE_DOPPLER_HZ: f64 = 97.2;
pub const SLOW_DOPPLER_HZ: f64 = 9.72;
pub const MODERATE_ROW: [f64; 5] = [1.0000, 0.9089, 0.6602, 0.3210, -0.0199];
/// Ascending eigenvalues of the moderate five-packet correlation.
pub const MODERATE_EIGENVALUES: [f64; 5] = [2.3661e-8, 7.0552e-4, 0.0646, 1.3589, 3.5757];
pub const SLOW_TOP_EIGENVALUE: f64 = 4.981;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub got: f64,
    pub want: f64,
    /// Allowed deviation.
    pub tol: f64,
    pub relative: bool,
}

impl Check {
    fn abs(name: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            got,
            want,
            tol,
            relative: false,
        }
    }

    fn rel(name: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        Self {
            relative: true,
            ..Self::abs(name, got, want, tol)
        }
    }

    pub fn deviation(&self) -> f64 {
        let d = (self.got - self.want).abs();
        if self.relative {
            d / self.want.abs()
        } else {
            d
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation() <= self.tol
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} got {:>14.7e} want {:>14.7e} ({} dev {:.2e} <= {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.got,
            self.want,
            if self.relative { "rel" } else { "abs" },
            self.deviation(),
            self.tol
        )
    }
}

/// All golden checks, in display order.
pub fn golden_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let f = compute_f(DIPOLE_ZA, LOAD_Z1, LOAD_Z2).expect("dipole loads are valid");
    out.push(Check::abs("F real part", f.re, DIPOLE_F.re, 5e-4));
    out.push(Check::abs("F imaginary part", f.im, DIPOLE_F.im, 5e-4));

    let za = recover_za(DIPOLE_F, LOAD_Z1, LOAD_Z2).expect("invertible");
    out.push(Check::abs("Z_A from rounded F (ohm)", (za - DIPOLE_ZA).norm(), 0.0, 0.1));
    let za = recover_za(f, LOAD_Z1, LOAD_Z2).expect("invertible");
    out.push(Check::abs("Z_A round trip (ohm)", (za - DIPOLE_ZA).norm(), 0.0, 1e-9));

    out.push(Check::abs("Doppler at 50 km/h (Hz)", doppler_hz(50.0, CARRIER_HZ), MODERATE_DOPPLER_HZ, 0.2));
    out.push(Check::abs("Doppler at 5 km/h (Hz)", doppler_hz(5.0, CARRIER_HZ), SLOW_DOPPLER_HZ, 0.02));

    let c = clarke_correlation(5, MODERATE_DOPPLER_HZ, SUBFRAME_S);
    for (k, want) in MODERATE_ROW.iter().enumerate() {
        out.push(Check::abs(format!("Clarke row entry {k}"), c[(0, k)].re, *want, 5e-4));
    }
    let eig = herm_eig_n(&c).expect("Clarke matrices are PSD");
    for k in 0..3 {
        let want = MODERATE_EIGENVALUES[4 - k];
        out.push(Check::rel(format!("moderate eigenvalue {}", 5 - k), eig.lambdas[k], want, 1e-3));
    }
    let slow = herm_eig_n(&clarke_correlation(5, SLOW_DOPPLER_HZ, SUBFRAME_S)).expect("Clarke matrices are PSD");
    out.push(Check::abs("slow top eigenvalue", slow.lambdas[0], SLOW_TOP_EIGENVALUE, 1e-3));
    out
}
