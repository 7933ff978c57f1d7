//! Jones calculus for the wave-plate analysers.
//!
//! A measurement module rotates the state to be detected onto `|H>` and sends
//! it through a polarising beam splitter, so the effective projector of an
//! analyser `U` is `U^dagger |H><H| U`. The settings tables only
//! name plate types and dial angles; how a dial angle maps to a fast axis and
//! in which order the plates are traversed is fixed here by checking every
//! candidate convention against both tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coherence::PauliAxis;
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, C64, ONE, ZERO};
use crate::steering::pauli_projector;

const MATCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WavePlateKind {
    #[serde(rename = "HWP")]
    Hwp,
    #[serde(rename = "QWP")]
    Qwp,
}

/// A wave plate and its dial angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePlateSetting {
    pub kind: WavePlateKind,
    pub angle_deg: f64,
}

impl WavePlateSetting {
    pub fn new(kind: WavePlateKind, angle_deg: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&angle_deg) {
            return Err(Error::OutOfRange(format!("wave-plate angle {angle_deg}°")));
        }
        Ok(Self { kind, angle_deg })
    }

    const fn hwp(angle_deg: f64) -> Self {
        Self {
            kind: WavePlateKind::Hwp,
            angle_deg,
        }
    }

    const fn qwp(angle_deg: f64) -> Self {
        Self {
            kind: WavePlateKind::Qwp,
            angle_deg,
        }
    }
}

/// Jones matrix of an ideal plate with its fast axis at `angle_deg` from
/// horizontal.
///
/// HWP: `[[cos2θ, sin2θ], [sin2θ, -cos2θ]]`.
/// QWP: `e^{-iπ/4} [[cos²θ + i sin²θ, (1-i) sinθ cosθ], [(1-i) sinθ cosθ, sin²θ + i cos²θ]]`.
pub fn waveplate_jones(kind: WavePlateKind, angle_deg: f64) -> ComplexMatrix {
    let t = angle_deg.to_radians();
    let entries = match kind {
        WavePlateKind::Hwp => {
            let (s2, c2) = (2.0 * t).sin_cos();
            [
                C64::new(c2, 0.0),
                C64::new(s2, 0.0),
                C64::new(s2, 0.0),
                C64::new(-c2, 0.0),
            ]
        }
        WavePlateKind::Qwp => {
            let (s, c) = t.sin_cos();
            let phase = C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
            let off = C64::new(1.0, -1.0) * (s * c);
            [
                phase * C64::new(c * c, s * s),
                phase * off,
                phase * off,
                phase * C64::new(s * s, c * c),
            ]
        }
    };
    ComplexMatrix::from_rows(2, &entries).expect("2x2")
}

/// Reference direction of the QWP dial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QwpDial {
    /// Fast axis at the dial angle, measured from horizontal.
    FastAxisFromHorizontal,
    /// Fast axis at `90° - dial`, i.e. the dial is read from the vertical.
    FastAxisFromVertical,
}

/// Order in which the photon traverses the two plates of a tomography analyser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cascade {
    QwpThenHwp,
    HwpThenQwp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JonesConvention {
    pub qwp_dial: QwpDial,
    pub cascade: Cascade,
}

impl fmt::Display for JonesConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dial = match self.qwp_dial {
            QwpDial::FastAxisFromHorizontal => "qwp-dial-from-horizontal",
            QwpDial::FastAxisFromVertical => "qwp-dial-from-vertical",
        };
        let order = match self.cascade {
            Cascade::QwpThenHwp => "qwp-then-hwp",
            Cascade::HwpThenQwp => "hwp-then-qwp",
        };
        write!(f, "{dial}, {order}")
    }
}

impl JonesConvention {
    pub const CANDIDATES: [JonesConvention; 4] = [
        JonesConvention {
            qwp_dial: QwpDial::FastAxisFromHorizontal,
            cascade: Cascade::QwpThenHwp,
        },
        JonesConvention {
            qwp_dial: QwpDial::FastAxisFromHorizontal,
            cascade: Cascade::HwpThenQwp,
        },
        JonesConvention {
            qwp_dial: QwpDial::FastAxisFromVertical,
            cascade: Cascade::QwpThenHwp,
        },
        JonesConvention {
            qwp_dial: QwpDial::FastAxisFromVertical,
            cascade: Cascade::HwpThenQwp,
        },
    ];

    /// The same convention with the QWP dial reference swapped.
    pub fn flipped(self) -> Self {
        Self {
            qwp_dial: match self.qwp_dial {
                QwpDial::FastAxisFromHorizontal => QwpDial::FastAxisFromVertical,
                QwpDial::FastAxisFromVertical => QwpDial::FastAxisFromHorizontal,
            },
            ..self
        }
    }

    pub fn plate(&self, setting: WavePlateSetting) -> ComplexMatrix {
        match (setting.kind, self.qwp_dial) {
            (WavePlateKind::Hwp, _) | (WavePlateKind::Qwp, QwpDial::FastAxisFromHorizontal) => {
                waveplate_jones(setting.kind, setting.angle_deg)
            }
            (WavePlateKind::Qwp, QwpDial::FastAxisFromVertical) => {
                waveplate_jones(WavePlateKind::Qwp, 90.0 - setting.angle_deg)
            }
        }
    }

    /// Jones matrix of a tomography analyser (both plates, before the PBS).
    pub fn analyser(&self, hwp_deg: f64, qwp_deg: f64) -> ComplexMatrix {
        let h = self.plate(WavePlateSetting::hwp(hwp_deg));
        let q = self.plate(WavePlateSetting::qwp(qwp_deg));
        match self.cascade {
            Cascade::QwpThenHwp => h * q,
            Cascade::HwpThenQwp => q * h,
        }
    }

    /// Projector realised by an analyser `U` followed by the PBS transmitted port.
    pub fn effective_projector(u: &ComplexMatrix) -> ComplexMatrix {
        let h = ComplexMatrix::outer(&[ONE, ZERO]).expect("2x2");
        u.adjoint() * h * *u
    }

    /// Projectors of the measurement module (`w1` settings), indexed `[axis][a]`.
    pub fn pmo_projectors(&self) -> [[ComplexMatrix; 2]; 3] {
        let mut out = [[ComplexMatrix::identity(2).expect("2x2"); 2]; 3];
        for col in PMO_TABLE {
            out[col.axis.index()][col.outcome] = Self::effective_projector(&self.plate(col.w1));
        }
        out
    }

    /// Tomography-module projectors for every Pauli axis and outcome, indexed `[axis][a]`.
    pub fn tomography_projectors(&self) -> [[ComplexMatrix; 2]; 3] {
        let mut out = [[ComplexMatrix::identity(2).expect("2x2"); 2]; 3];
        for col in TOMOGRAPHY_TABLE {
            let u = self.analyser(col.hwp_deg, col.qwp_deg);
            out[col.axis.index()][col.outcome] = Self::effective_projector(&u);
        }
        out
    }
}

/// One column of the measurement-module table: `w1` before the PBS defines
/// the projector, `w2` after it re-prepares the measured eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmoColumn {
    pub axis: PauliAxis,
    pub outcome: usize,
    pub w1: WavePlateSetting,
    pub w2: WavePlateSetting,
}

/// One column of the tomography-module table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyColumn {
    pub axis: PauliAxis,
    pub outcome: usize,
    pub hwp_deg: f64,
    pub qwp_deg: f64,
}

/// Wave-plate settings realising each projective measurement on Alice's photon.
pub const PMO_TABLE: [PmoColumn; 6] = [
    PmoColumn {
        axis: PauliAxis::X,
        outcome: 0,
        w1: WavePlateSetting::hwp(22.5),
        w2: WavePlateSetting::hwp(22.5),
    },
    PmoColumn {
        axis: PauliAxis::X,
        outcome: 1,
        w1: WavePlateSetting::hwp(-22.5),
        w2: WavePlateSetting::hwp(-22.5),
    },
    PmoColumn {
        axis: PauliAxis::Y,
        outcome: 0,
        w1: WavePlateSetting::qwp(45.0),
        w2: WavePlateSetting::qwp(-45.0),
    },
    PmoColumn {
        axis: PauliAxis::Y,
        outcome: 1,
        w1: WavePlateSetting::qwp(-45.0),
        w2: WavePlateSetting::qwp(45.0),
    },
    PmoColumn {
        axis: PauliAxis::Z,
        outcome: 0,
        w1: WavePlateSetting::hwp(0.0),
        w2: WavePlateSetting::hwp(0.0),
    },
    PmoColumn {
        axis: PauliAxis::Z,
        outcome: 1,
        w1: WavePlateSetting::hwp(45.0),
        w2: WavePlateSetting::hwp(45.0),
    },
];

/// HWP and QWP dial angles of the tomography module for both photons.
pub const TOMOGRAPHY_TABLE: [TomographyColumn; 6] = [
    TomographyColumn {
        axis: PauliAxis::X,
        outcome: 0,
        hwp_deg: 22.5,
        qwp_deg: 45.0,
    },
    TomographyColumn {
        axis: PauliAxis::X,
        outcome: 1,
        hwp_deg: -22.5,
        qwp_deg: 45.0,
    },
    TomographyColumn {
        axis: PauliAxis::Y,
        outcome: 0,
        hwp_deg: 22.5,
        qwp_deg: 0.0,
    },
    TomographyColumn {
        axis: PauliAxis::Y,
        outcome: 1,
        hwp_deg: -22.5,
        qwp_deg: 0.0,
    },
    TomographyColumn {
        axis: PauliAxis::Z,
        outcome: 0,
        hwp_deg: 0.0,
        qwp_deg: 0.0,
    },
    TomographyColumn {
        axis: PauliAxis::Z,
        outcome: 1,
        hwp_deg: 45.0,
        qwp_deg: 0.0,
    },
];

/// Which Pauli eigenprojector, if any, a 2×2 projector equals.
pub fn identify_pmo(projector: &ComplexMatrix) -> Option<(PauliAxis, usize)> {
    PauliAxis::ALL
        .iter()
        .flat_map(|&axis| [(axis, 0), (axis, 1)])
        .find(|&(axis, a)| {
            pauli_projector(axis, a)
                .map(|m| m.max_abs_diff(projector) <= MATCH_TOL)
                .unwrap_or(false)
        })
}

fn same_ray(a: &[C64], b: &[C64]) -> bool {
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (overlap.norm() - 1.0).abs() <= MATCH_TOL
}

/// Identifies the measurement realised by `w1` and checks that `w2`
/// re-prepares its eigenstate from `|H>`.
pub fn verify_pmo_table(
    column: &PmoColumn,
    convention: &JonesConvention,
) -> Result<(PauliAxis, usize)> {
    let projector = JonesConvention::effective_projector(&convention.plate(column.w1));
    let (axis, outcome) = identify_pmo(&projector).ok_or_else(|| {
        Error::OutOfRange(format!(
            "{:?} does not realise a Pauli projector",
            column.w1
        ))
    })?;
    let prepared = convention.plate(column.w2).apply(&[ONE, ZERO]);
    if !same_ray(&prepared, &axis.eigenvector(outcome)) {
        return Err(Error::OutOfRange(format!(
            "{:?} does not re-prepare the {axis}{outcome} eigenstate",
            column.w2
        )));
    }
    Ok((axis, outcome))
}

/// Identifies the measurement realised by a tomography analyser.
pub fn verify_tomography_table(
    hwp_deg: f64,
    qwp_deg: f64,
    convention: &JonesConvention,
) -> Result<(PauliAxis, usize)> {
    let projector = JonesConvention::effective_projector(&convention.analyser(hwp_deg, qwp_deg));
    identify_pmo(&projector).ok_or_else(|| {
        Error::OutOfRange(format!(
            "HWP {hwp_deg}°, QWP {qwp_deg}° does not realise a Pauli projector"
        ))
    })
}

/// Outcome of checking one table column against its label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnCheck {
    pub table: &'static str,
    pub label: String,
    pub realised: Option<String>,
    pub passed: bool,
}

fn pmo_label(axis: PauliAxis, outcome: usize) -> String {
    format!("M{outcome}^{axis}")
}

/// Checks all twelve columns of both settings tables.
pub fn check_tables(convention: &JonesConvention) -> Vec<ColumnCheck> {
    let mut out = Vec::with_capacity(12);
    for col in &PMO_TABLE {
        let got = verify_pmo_table(col, convention).ok();
        out.push(ColumnCheck {
            table: "pmo",
            label: pmo_label(col.axis, col.outcome),
            realised: got.map(|(a, o)| pmo_label(a, o)),
            passed: got == Some((col.axis, col.outcome)),
        });
    }
    for col in &TOMOGRAPHY_TABLE {
        let got = verify_tomography_table(col.hwp_deg, col.qwp_deg, convention).ok();
        out.push(ColumnCheck {
            table: "tomography",
            label: pmo_label(col.axis, col.outcome),
            realised: got.map(|(a, o)| pmo_label(a, o)),
            passed: got == Some((col.axis, col.outcome)),
        });
    }
    out
}

/// The unique candidate convention under which both tables reproduce their labels.
pub fn select_convention() -> Result<JonesConvention> {
    let passing: Vec<_> = JonesConvention::CANDIDATES
        .iter()
        .copied()
        .filter(|c| check_tables(c).iter().all(|r| r.passed))
        .collect();
    match passing.as_slice() {
        [only] => Ok(*only),
        [] => Err(Error::OutOfRange(
            "no Jones convention reproduces both settings tables".into(),
        )),
        many => Err(Error::OutOfRange(format!(
            "{} Jones conventions reproduce the settings tables",
            many.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn ket(a: f64, b: C64) -> [C64; 2] {
        [C64::new(a, 0.0), b]
    }

    #[test]
    fn jones_matrices_are_unitary() {
        for kind in [WavePlateKind::Hwp, WavePlateKind::Qwp] {
            for k in -18..=18 {
                let u = waveplate_jones(kind, 5.0 * k as f64);
                let id = ComplexMatrix::identity(2).unwrap();
                assert!((u.adjoint() * u).max_abs_diff(&id) < TOL);
            }
        }
    }

    #[test]
    fn hwp_examples() {
        let u = waveplate_jones(WavePlateKind::Hwp, 0.0);
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap();
        assert!(u.max_abs_diff(&z) < TOL);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = waveplate_jones(WavePlateKind::Hwp, 22.5);
        let hadamard = ComplexMatrix::from_rows(
            2,
            &[
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
            ],
        )
        .unwrap();
        assert!(h.max_abs_diff(&hadamard) < TOL);
        let out = h.apply(&ket(s, C64::new(s, 0.0)));
        assert!((out[0].norm() - 1.0).abs() < TOL && out[1].norm() < TOL);
    }

    #[test]
    fn qwp_at_45_maps_r_to_h() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let out = waveplate_jones(WavePlateKind::Qwp, 45.0).apply(&ket(s, C64::new(0.0, s)));
        assert!(out[1].norm() < TOL);
        assert!((out[0].norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn setting_angle_range() {
        assert!(WavePlateSetting::new(WavePlateKind::Hwp, 91.0).is_err());
        assert!(WavePlateSetting::new(WavePlateKind::Qwp, -90.0).is_ok());
    }

    #[test]
    fn table_one_examples() {
        let c = select_convention().unwrap();
        assert_eq!(
            verify_pmo_table(&PMO_TABLE[0], &c).unwrap(),
            (PauliAxis::X, 0)
        );
        assert_eq!(
            verify_pmo_table(&PMO_TABLE[2], &c).unwrap(),
            (PauliAxis::Y, 0)
        );
        assert_eq!(
            verify_pmo_table(&PMO_TABLE[4], &c).unwrap(),
            (PauliAxis::Z, 0)
        );
    }

    #[test]
    fn table_five_examples() {
        let c = select_convention().unwrap();
        assert_eq!(
            verify_tomography_table(22.5, 45.0, &c).unwrap(),
            (PauliAxis::X, 0)
        );
        assert_eq!(
            verify_tomography_table(0.0, 0.0, &c).unwrap(),
            (PauliAxis::Z, 0)
        );
        assert_eq!(
            verify_tomography_table(22.5, 0.0, &c).unwrap(),
            (PauliAxis::Y, 0)
        );
    }

    #[test]
    fn selected_convention_is_unique_and_flip_breaks_it() {
        let c = select_convention().unwrap();
        assert_eq!(c.qwp_dial, QwpDial::FastAxisFromVertical);
        assert_eq!(c.cascade, Cascade::QwpThenHwp);
        assert!(check_tables(&c).iter().all(|r| r.passed));

        let flipped = check_tables(&c.flipped());
        let failures: Vec<_> = flipped.iter().filter(|r| !r.passed).collect();
        assert!(!failures.is_empty());
        assert!(failures.iter().all(|r| r.table == "tomography"));

        // the dial read from horizontal swaps R and L in the tomography module
        let naive = JonesConvention {
            qwp_dial: QwpDial::FastAxisFromHorizontal,
            cascade: Cascade::QwpThenHwp,
        };
        assert_eq!(
            verify_tomography_table(22.5, 0.0, &naive).unwrap(),
            (PauliAxis::Y, 1)
        );
    }

    #[test]
    fn tomography_projectors_are_pauli_projectors() {
        let c = select_convention().unwrap();
        let p = c.tomography_projectors();
        for axis in PauliAxis::ALL {
            for a in 0..2 {
                let m = pauli_projector(axis, a).unwrap();
                assert!(p[axis.index()][a].max_abs_diff(&m) < 1e-10);
            }
        }
    }
}
