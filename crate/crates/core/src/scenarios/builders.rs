use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::CouplingMatrix;

use super::spec::{GridSpec, InitialGuess, PotentialSpec, ScenarioSpec};

/// Symmetric matrix from its diagonal and a list of `(i, j, g_ij)` with `i < j`.
/// Unlisted off-diagonal entries are zero.
fn symmetric(diag: &[f64], off: &[(usize, usize, f64)]) -> CouplingMatrix {
    let n = diag.len();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, &d) in diag.iter().enumerate() {
        rows[i][i] = d;
    }
    for &(i, j, g) in off {
        rows[i][j] = g;
        rows[j][i] = g;
    }
    CouplingMatrix::new(rows).expect("symmetric by construction")
}

fn trapped(name: String, coupling: CouplingMatrix) -> ScenarioSpec {
    let m = coupling.size();
    ScenarioSpec {
        name,
        grid: GridSpec::default(),
        eps: vec![1.0; m],
        potentials: vec![PotentialSpec::HarmonicPlusOne { scale: 2.0 }; m],
        coupling,
        initial: InitialGuess::Gaussian,
        quadrature: Default::default(),
    }
}

/// Three components with `g = [[2, 4, 4], [4, 4, g23], [4, g23, 6]]` in the
/// potential `2 (x² + y² + 1)`.
pub fn example1(g23: f64) -> ScenarioSpec {
    trapped(
        format!("example1(g23={g23})"),
        symmetric(&[2.0, 4.0, 6.0], &[(0, 1, 4.0), (0, 2, 4.0), (1, 2, g23)]),
    )
}

/// Four components, diagonal `(2, 4, 6, 8)`, every off-diagonal entry 4
/// except `g34`.
pub fn example2(g34: f64) -> ScenarioSpec {
    trapped(
        format!("example2(g34={g34})"),
        symmetric(
            &[2.0, 4.0, 6.0, 8.0],
            &[
                (0, 1, 4.0),
                (0, 2, 4.0),
                (0, 3, 4.0),
                (1, 2, 4.0),
                (1, 3, 4.0),
                (2, 3, g34),
            ],
        ),
    )
}

pub fn example3() -> ScenarioSpec {
    trapped(
        "example3".to_owned(),
        symmetric(
            &[2.0, 4.0, 6.0, 8.0],
            &[
                (0, 1, 4.0),
                (0, 2, 2.0),
                (0, 3, 2.0),
                (1, 2, 4.0),
                (1, 3, 4.0),
                (2, 3, 8.0),
            ],
        ),
    )
}

/// Two components with constant potentials `a_i = ω_i`, started from the
/// randomized guess.
pub fn two_component_semitrivial(
    omega1: f64,
    omega2: f64,
    g11: f64,
    g22: f64,
    g12: f64,
) -> ScenarioSpec {
    ScenarioSpec {
        name: format!("semitrivial(omega=({omega1},{omega2}),g=({g11},{g22},{g12}))"),
        grid: GridSpec::default(),
        eps: vec![1.0; 2],
        potentials: vec![
            PotentialSpec::Constant { omega: omega1 },
            PotentialSpec::Constant { omega: omega2 },
        ],
        coupling: symmetric(&[g11, g22], &[(0, 1, g12)]),
        initial: InitialGuess::Randomized { seed: None },
        quadrature: Default::default(),
    }
}

/// Placement of the two Gaussian stirrers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StirrerLayout {
    /// Centers at `(0.5, 0.5)` and `(-0.5, -0.5)`.
    Opposite,
    /// Both at the origin.
    Centered,
}

/// Two components in a harmonic trap with a Gaussian stirrer of height `w`
/// and width `delta` each; `g = [[1, 10], [10, 3]]`.
pub fn stirrer(w: f64, delta: f64, layout: StirrerLayout) -> ScenarioSpec {
    let centers = match layout {
        StirrerLayout::Opposite => [(0.5, 0.5), (-0.5, -0.5)],
        StirrerLayout::Centered => [(0.0, 0.0), (0.0, 0.0)],
    };
    let tag = match layout {
        StirrerLayout::Opposite => "stirrer",
        StirrerLayout::Centered => "stirrer_centered",
    };
    ScenarioSpec {
        name: format!("{tag}(w={w},delta={delta})"),
        grid: GridSpec::default(),
        eps: vec![1.0; 2],
        potentials: centers
            .iter()
            .map(|&(xc, yc)| PotentialSpec::GaussianStirrer { w, delta, xc, yc })
            .collect(),
        coupling: symmetric(&[1.0, 3.0], &[(0, 1, 10.0)]),
        initial: InitialGuess::Randomized { seed: None },
        quadrature: Default::default(),
    }
}

/// Small equal diffusion `eps` in the trap `x² + y² + 1` with
/// `g = [[1, 10], [10, 3]]`, on the finer `M = 128` grid.
pub fn singular(eps: f64) -> ScenarioSpec {
    ScenarioSpec {
        name: format!("singular(eps={eps})"),
        grid: GridSpec {
            half_width: 1.0,
            subdivisions: 128,
        },
        eps: vec![eps; 2],
        potentials: vec![PotentialSpec::HarmonicPlusOne { scale: 1.0 }; 2],
        coupling: symmetric(&[1.0, 3.0], &[(0, 1, 10.0)]),
        initial: InitialGuess::Gaussian,
        quadrature: Default::default(),
    }
}

type Params = &'static [(&'static str, f64)];

/// Registered builders with their parameters and defaults.
const REGISTRY: &[(&str, Params)] = &[
    ("example1", &[("g23", 8.0)]),
    ("example2", &[("g34", 8.0)]),
    ("example3", &[]),
    (
        "semitrivial",
        &[("omega1", 1.0), ("omega2", 1.0), ("g11", 1.0), ("g22", 2.0), ("g12", 2.0)],
    ),
    ("stirrer", &[("w", 1.0), ("delta", 1.0)]),
    ("stirrer_centered", &[("w", 1.0), ("delta", 1.0)]),
    ("singular", &[("eps", 0.1)]),
];

pub fn builder_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

/// Looks up a builder by name and fills unspecified parameters with defaults.
pub fn named(name: &str, params: &BTreeMap<String, f64>) -> Result<ScenarioSpec> {
    let (_, defaults) = REGISTRY.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "unknown scenario `{name}`; available: {}",
            builder_names().join(", ")
        ))
    })?;
    for key in params.keys() {
        if !defaults.iter().any(|(k, _)| k == key) {
            let allowed: Vec<_> = defaults.iter().map(|(k, _)| *k).collect();
            return Err(Error::InvalidParameter(format!(
                "scenario `{name}` has no parameter `{key}` (accepted: {})",
                if allowed.is_empty() { "none".to_owned() } else { allowed.join(", ") }
            )));
        }
    }
    if let Some((key, v)) = params.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("scenario parameter `{key}` = {v} is not finite")));
    }
    let get = |key: &str| {
        params.get(key).copied().unwrap_or_else(|| {
            defaults.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).unwrap_or(f64::NAN)
        })
    };
    Ok(match name {
        "example1" => example1(get("g23")),
        "example2" => example2(get("g34")),
        "example3" => example3(),
        "semitrivial" => two_component_semitrivial(
            get("omega1"),
            get("omega2"),
            get("g11"),
            get("g22"),
            get("g12"),
        ),
        "stirrer" => stirrer(get("w"), get("delta"), StirrerLayout::Opposite),
        "stirrer_centered" => stirrer(get("w"), get("delta"), StirrerLayout::Centered),
        "singular" => singular(get("eps")),
        _ => unreachable!("registry and dispatch disagree on `{name}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingRegime;

    #[test]
    fn examples_match_their_parameter_sets() {
        let e1 = example1(6.0);
        assert_eq!(e1.coupling.get(1, 2), 6.0);
        assert_eq!(e1.coupling.get(2, 1), 6.0);
        assert_eq!(e1.coupling.regime(), CouplingRegime::FullyCooperative);
        let e2 = example2(10.0);
        assert_eq!((e2.coupling.get(3, 3), e2.coupling.get(2, 3)), (8.0, 10.0));
        let e3 = example3();
        assert_eq!((e3.coupling.get(0, 2), e3.coupling.get(2, 3)), (2.0, 8.0));
        assert_eq!(e3.coupling.get(3, 1), 4.0);
    }

    #[test]
    fn every_registered_builder_validates() {
        for name in builder_names() {
            let spec = named(name, &BTreeMap::new()).unwrap();
            let spec = spec.with_subdivisions(16);
            spec.build().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn builders_are_pure() {
        assert_eq!(example1(8.0), example1(8.0));
        assert_eq!(stirrer(8.0, 1.0, StirrerLayout::Opposite), stirrer(8.0, 1.0, StirrerLayout::Opposite));
    }

    #[test]
    fn registry_errors_name_the_alternatives() {
        let err = named("example9", &BTreeMap::new()).unwrap_err().to_string();
        assert!(err.contains("example1") && err.contains("singular"), "{err}");
        let params = BTreeMap::from([("g12".to_owned(), 3.0)]);
        let err = named("example1", &params).unwrap_err().to_string();
        assert!(err.contains("g23"), "{err}");
        let params = BTreeMap::from([("g23".to_owned(), f64::NAN)]);
        assert!(named("example1", &params).is_err());
    }

    #[test]
    fn overrides_apply() {
        let params = BTreeMap::from([("g12".to_owned(), 3.49), ("g22".to_owned(), 4.0)]);
        let s = named("semitrivial", &params).unwrap();
        assert_eq!((s.coupling.get(0, 1), s.coupling.get(1, 1)), (3.49, 4.0));
        assert_eq!(singular(0.01).grid.subdivisions, 128);
    }
}
