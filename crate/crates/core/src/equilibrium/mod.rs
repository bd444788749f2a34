//! Equilibrium measure of a one-cut external field: the (c1, c0) solve,
//! density, g-functions, ℓ, φ, edge variables and regularity checks.

mod contour;
mod density;
mod energy;
mod field;
mod gfun;
mod regularity;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

pub use contour::{
    contour_integral_vprime, solve_c0, solve_parameters, solve_parameters_detailed, ParameterSolve,
    Weight,
};
pub use energy::{energy, kernel};
pub use field::FieldSpec;
pub use gfun::{Edge, GKind};
pub use regularity::{EdgeProbe, RegularityReport};

use crate::error::{Error, Result};
use crate::jmap::{GammaTable, MapParams};
use crate::numerics::find_root;
use contour::Gamma1;
use density::DensityGrid;

/// Everything derived from a solved field: map parameters, density, ℓ and
/// the regularity report. Immutable once built.
#[derive(Debug, Clone)]
pub struct EquilibriumData {
    pub field: FieldSpec,
    pub map: MapParams,
    pub ell: f64,
    /// ℓ evaluated at the left endpoint instead of the right one
    pub ell_a: f64,
    /// Sign changes seen while bracketing c1; `None` when (c1, c0) were supplied.
    pub sign_changes: Option<usize>,
    pub regularity: RegularityReport,
    pub(crate) grid: DensityGrid,
    pub(crate) gamma: Arc<GammaTable>,
    contour: Arc<Gamma1>,
    radius: f64,
}

impl EquilibriumData {
    /// Solves for (c1, c0) and builds the equilibrium data.
    pub fn new(field: FieldSpec) -> Result<Self> {
        let solve = solve_parameters_detailed(&field)?;
        Self::assemble(field, solve.map, solve.gamma, Some(solve.sign_changes))
    }

    /// Builds the data for given map parameters, skipping the solve.
    pub fn from_parameters(field: FieldSpec, c1: f64, c0: f64) -> Result<Self> {
        field.validate()?;
        let map = MapParams::new(c1, c0)?;
        let gamma = Arc::new(GammaTable::new(c1)?);
        Self::assemble(field, map, gamma, None)
    }

    fn assemble(
        field: FieldSpec,
        map: MapParams,
        gamma: Arc<GammaTable>,
        sign_changes: Option<usize>,
    ) -> Result<Self> {
        let grid = DensityGrid::build(&field, &map, &gamma)?;
        let radius = density::enclosing_radius(&gamma);
        let mut data = EquilibriumData {
            field,
            map,
            ell: 0.0,
            ell_a: 0.0,
            sign_changes,
            regularity: placeholder_report(),
            grid,
            contour: Arc::new(Gamma1::from_table(gamma.clone())),
            gamma,
            radius,
        };
        let (lb, la) = data.ell_pair()?;
        data.ell = lb;
        data.ell_a = la;
        data.compute_ell()?;
        data.regularity = data.check_one_cut_regular()?;
        Ok(data)
    }

    /// ψ_V(x) from the Chebyshev interpolant; zero outside [a, b].
    pub fn density(&self, x: f64) -> f64 {
        self.grid.psi(&self.map, x)
    }

    /// ψ_V(x) from the log-kernel integral formula.
    pub fn density_psi(&self, x: f64) -> Result<f64> {
        density::psi_formula(&self.field, &self.map, &self.gamma, x)
    }

    /// ψ_V(x) from the jump of M across γ.
    pub fn density_psi_m(&self, x: f64) -> Result<f64> {
        density::psi_from_m(&self.field, &self.map, &self.gamma, self.radius, x)
    }

    /// The (x, ψ) samples the interpolant was built from, ordered by x.
    pub fn density_grid(&self) -> Vec<(f64, f64)> {
        self.grid
            .x
            .iter()
            .copied()
            .zip(self.grid.psi.iter().copied())
            .collect()
    }

    /// μ_V((x, b])
    pub fn mass_right(&self, x: f64) -> f64 {
        self.grid.mass_right(&self.map, x)
    }

    /// μ_V([a, x))
    pub fn mass_left(&self, x: f64) -> f64 {
        self.grid.mass_left(&self.map, x)
    }

    /// μ_V((−∞, x]), exactly 0 left of a and 1 right of b.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.map.a {
            0.0
        } else if x >= self.map.b {
            1.0
        } else {
            self.mass_left(x).clamp(0.0, 1.0)
        }
    }

    /// x with μ_V([a, x]) = p.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "quantile level {p} not in [0, 1]"
            )));
        }
        if p == 0.0 {
            return Ok(self.map.a);
        }
        if p == 1.0 {
            return Ok(self.map.b);
        }
        find_root(
            |x| self.cdf(x) - p,
            self.map.a,
            self.map.b,
            1e-14 * (self.map.b - self.map.a),
        )
    }

    /// I₊(x) on γ1 from the spectral table.
    pub fn i_plus(&self, x: f64) -> Complex64 {
        self.gamma.inverse_plus(&self.map, x)
    }

    /// Distances from s to γ1 and to γ2.
    pub fn gamma_distances(&self, s: Complex64) -> (f64, f64) {
        let z = self.map.j_raw(s);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return (0.0, 0.0);
        }
        let t = self
            .gamma
            .inverse_plus(&self.map, z.re.clamp(self.map.a, self.map.b));
        ((s - t).norm(), (s - t.conj()).norm())
    }

    fn distance_to_gamma(&self, s: Complex64) -> f64 {
        let (d1, d2) = self.gamma_distances(s);
        d1.min(d2)
    }

    /// M(s) off γ: the exterior formula outside D̄, the interior one inside D.
    pub fn eval_m(&self, s: Complex64) -> Result<Complex64> {
        if self.distance_to_gamma(s) < 1e-8 {
            return Err(Error::NearSingular(format!("{s} is within 1e-8 of gamma")));
        }
        let c0 = self.map.c0;
        let field = &self.field;
        let line = |w: Complex64| {
            self.contour
                .integrate(|n| Complex64::new(field.v1(c0 + n.x_rel), 0.0) / (n.s - w))
        };
        let cauchy = (-line(s)? + line(s.conj())?.conj()) / Complex64::new(0.0, 2.0 * PI);
        Ok(if self.map.in_domain_d(s) {
            cauchy
        } else {
            -cauchy
        })
    }
}

fn placeholder_report() -> RegularityReport {
    let probe = EdgeProbe {
        ratios: [f64::NAN; 3],
        finite_positive: false,
        slow_convergence: false,
    };
    RegularityReport {
        mass_error: f64::NAN,
        normalization: false,
        min_density: f64::NAN,
        argmin_density: f64::NAN,
        positivity: false,
        edge_a: probe.clone(),
        edge_b: probe,
        square_root_edges: false,
        equality_residual: f64::NAN,
        equality: false,
        max_exterior_phi: f64::NAN,
        inequality: false,
    }
}
