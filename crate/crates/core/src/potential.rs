//! Random-walk label priors via the Dirichlet problem on the graph Laplacian.
//!
//! The probability that a walk from `x` hits an `i`-labelled node before any
//! other labelled node is the harmonic function `u` with `u = 1` on the
//! `i`-labelled set, `u = 0` on the other labelled nodes, and `Lu = 0`
//! elsewhere. Restricting `L` to the interior `F` gives the SPD system
//! `L_FF u_F = -L_{F,∂} u_∂`, which is shared by every label.

use crate::distribution::LabelDistribution;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::SpdSystem;
use crate::par;

/// Allowed excursion outside `[0, 1]` before clipping.
pub const BOUND_TOL: f64 = 1e-9;

/// Allowed deviation of `Σ_i P_i(y)` from 1 before renormalisation.
pub const PARTITION_TOL: f64 = 1e-8;

/// Boundary data: `ones` carry value 1, `zeros` value 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCondition {
    ones: Vec<usize>,
    zeros: Vec<usize>,
}

impl BoundaryCondition {
    pub fn new(n: usize, mut ones: Vec<usize>, mut zeros: Vec<usize>) -> Result<Self> {
        ones.sort_unstable();
        ones.dedup();
        zeros.sort_unstable();
        zeros.dedup();
        if ones.is_empty() {
            return Err(Error::Input("boundary set with value 1 is empty".into()));
        }
        if let Some(&v) = ones.iter().chain(&zeros).find(|&&v| v >= n) {
            return Err(Error::Input(format!("boundary node {v} outside 0..{n}")));
        }
        if let Some(v) = ones.iter().find(|v| zeros.binary_search(v).is_ok()) {
            return Err(Error::Input(format!("node {v} is in both boundary sets")));
        }
        Ok(BoundaryCondition { ones, zeros })
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn zeros(&self) -> &[usize] {
        &self.zeros
    }

    fn boundary_mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in self.ones.iter().chain(&self.zeros) {
            m[v] = true;
        }
        m
    }
}

/// Factorised interior system for a fixed boundary set.
struct InteriorSystem {
    /// Interior nodes, ascending.
    interior: Vec<usize>,
    /// Position of each node in `interior`, or `usize::MAX`.
    position: Vec<usize>,
    system: Option<SpdSystem>,
}

impl InteriorSystem {
    fn new(g: &Graph, interior: Vec<usize>) -> Result<Self> {
        let mut position = vec![usize::MAX; g.node_count()];
        for (a, &v) in interior.iter().enumerate() {
            position[v] = a;
        }
        let system = if interior.is_empty() {
            None
        } else {
            Some(SpdSystem::new(g.laplacian().principal_submatrix(&interior))?)
        };
        Ok(InteriorSystem {
            interior,
            position,
            system,
        })
    }

    /// Harmonic extension of the 0/1 indicator `ones` (boundary nodes only).
    fn solve_indicator(&self, g: &Graph, ones: &[bool]) -> Result<Vec<f64>> {
        let mut u: Vec<f64> = ones.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let Some(system) = &self.system else {
            return Ok(u);
        };
        let rhs: Vec<f64> = self
            .interior
            .iter()
            .map(|&x| g.neighbors(x).iter().filter(|&&y| ones[y]).count() as f64)
            .collect();
        let sol = system.solve(&rhs)?;
        for (&x, &v) in self.interior.iter().zip(&sol) {
            u[x] = v;
        }
        Ok(u)
    }

    fn contains(&self, v: usize) -> bool {
        self.position[v] != usize::MAX
    }
}

/// Errors if some component holding an interior node has no boundary node.
fn check_components(g: &Graph, boundary: &[bool]) -> Result<()> {
    for comp in g.connected_components() {
        if !comp.iter().any(|&v| boundary[v]) {
            return Err(Error::Singular(format!(
                "component containing node {} ({} nodes) has no boundary node",
                comp[0],
                comp.len()
            )));
        }
    }
    Ok(())
}

fn clip_checked(u: &mut [f64]) -> Result<()> {
    for (x, v) in u.iter_mut().enumerate() {
        if *v < -BOUND_TOL || *v > 1.0 + BOUND_TOL {
            return Err(Error::Convergence(format!(
                "value {v} at node {x} violates the maximum principle"
            )));
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(())
}

/// Solves `Lu = 0` off the boundary with `u = 1` on `bc.ones()` and `u = 0`
/// on `bc.zeros()`.
pub fn solve_dirichlet(g: &Graph, bc: &BoundaryCondition) -> Result<Vec<f64>> {
    let n = g.node_count();
    let boundary = bc.boundary_mask(n);
    check_components(g, &boundary)?;
    let interior = (0..n).filter(|&v| !boundary[v]).collect();
    let sys = InteriorSystem::new(g, interior)?;
    let mut ones = vec![false; n];
    for &v in bc.ones() {
        ones[v] = true;
    }
    let mut u = sys.solve_indicator(g, &ones)?;
    clip_checked(&mut u)?;
    Ok(u)
}

/// Equilibrium measure of `set`: `Lv = 1` on `set`, `v = 0` elsewhere.
pub fn equilibrium_measure(g: &Graph, set: &[usize]) -> Result<Vec<f64>> {
    let n = g.node_count();
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::Input(format!("node {v} outside 0..{n}")));
        }
        inside[v] = true;
    }
    if set.is_empty() {
        return Err(Error::Input("equilibrium set is empty".into()));
    }
    let outside: Vec<bool> = inside.iter().map(|b| !b).collect();
    for comp in g.connected_components() {
        if comp.iter().any(|&v| inside[v]) && !comp.iter().any(|&v| outside[v]) {
            return Err(Error::Singular(format!(
                "component containing node {} lies entirely inside the set",
                comp[0]
            )));
        }
    }
    let interior: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
    let system = SpdSystem::new(g.laplacian().principal_submatrix(&interior))?;
    let sol = system.solve(&vec![1.0; interior.len()])?;
    let mut v = vec![0.0; n];
    for (&x, &s) in interior.iter().zip(&sol) {
        v[x] = s;
    }
    Ok(v)
}

/// Dirichlet solution through equilibrium measures:
/// `u(x) = Σ_{z ∈ ones} [v^{{z}∪F}(x) - v^F(x)] / v^{{z}∪F}(z)` with `F` the
/// interior. One equilibrium solve per boundary-one node, so this is meant as
/// a cross-check on small graphs.
pub fn dirichlet_via_equilibrium(g: &Graph, bc: &BoundaryCondition) -> Result<Vec<f64>> {
    let n = g.node_count();
    let boundary = bc.boundary_mask(n);
    check_components(g, &boundary)?;
    let interior: Vec<usize> = (0..n).filter(|&v| !boundary[v]).collect();
    let base = if interior.is_empty() {
        vec![0.0; n]
    } else {
        equilibrium_measure(g, &interior)?
    };
    let mut u = vec![0.0; n];
    for &z in bc.ones() {
        let mut set = interior.clone();
        let at = set.partition_point(|&v| v < z);
        set.insert(at, z);
        let vz = equilibrium_measure(g, &set)?;
        let scale = vz[z];
        for x in 0..n {
            u[x] += (vz[x] - base[x]) / scale;
        }
    }
    Ok(u)
}

/// Random-walk prior and the warnings raised while computing it.
#[derive(Debug, Clone)]
pub struct RwOutcome {
    pub distribution: LabelDistribution,
    /// Nodes in components without any labelled node (given uniform rows).
    pub uncovered: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Hitting probabilities `P_i(y)` for every label `i`, from one Dirichlet
/// solve per label over a shared factorisation. Labelled rows are exact
/// one-hots; components with no labelled node get uniform rows and a warning.
pub fn rw_probabilities(g: &Graph, known: &[Option<usize>], l: usize) -> Result<RwOutcome> {
    let n = g.node_count();
    if known.len() != n {
        return Err(Error::Input(format!(
            "label map covers {} nodes, graph has {n}",
            known.len()
        )));
    }
    if let Some((v, c)) = known
        .iter()
        .enumerate()
        .find_map(|(v, c)| c.filter(|&c| c >= l).map(|c| (v, c)))
    {
        return Err(Error::Input(format!("node {v} has label {c} outside 0..{l}")));
    }
    if known.iter().all(Option::is_none) {
        return Err(Error::Input("no labelled nodes".into()));
    }

    let mut warnings = Vec::new();
    let mut uncovered = Vec::new();
    for comp in g.connected_components() {
        if comp.iter().all(|&v| known[v].is_none()) {
            warnings.push(format!(
                "component containing node {} ({} nodes) has no labelled node; using uniform rows",
                comp[0],
                comp.len()
            ));
            uncovered.extend_from_slice(&comp);
        }
    }
    uncovered.sort_unstable();
    let mut is_uncovered = vec![false; n];
    for &v in &uncovered {
        is_uncovered[v] = true;
    }

    let interior: Vec<usize> = (0..n).filter(|&v| known[v].is_none() && !is_uncovered[v]).collect();
    let sys = InteriorSystem::new(g, interior)?;
    let per_label = par::map_range(l, |i| {
        let ones: Vec<bool> = known.iter().map(|&c| c == Some(i)).collect();
        sys.solve_indicator(g, &ones)
    });
    let per_label = per_label.into_iter().collect::<Result<Vec<_>>>()?;

    let mut values = vec![0.0; n * l];
    for v in 0..n {
        let row = &mut values[v * l..(v + 1) * l];
        if let Some(c) = known[v] {
            row[c] = 1.0;
        } else if is_uncovered[v] {
            row.fill(1.0 / l as f64);
        } else {
            debug_assert!(sys.contains(v));
            for (i, u) in per_label.iter().enumerate() {
                row[i] = u[v];
            }
            clip_checked(row)?;
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > PARTITION_TOL {
                return Err(Error::Convergence(format!(
                    "hitting probabilities at node {v} sum to {s}"
                )));
            }
            row.iter_mut().for_each(|p| *p /= s);
        }
    }
    Ok(RwOutcome {
        distribution: LabelDistribution::new(n, l, values)?,
        uncovered,
        warnings,
    })
}

/// Per-node argmax of a random-walk distribution, ties to the lowest label.
pub fn rw_classify(dist: &LabelDistribution) -> Vec<usize> {
    dist.argmax()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &e).unwrap()
    }

    #[test]
    fn path_midpoint() {
        let bc = BoundaryCondition::new(3, vec![0], vec![2]).unwrap();
        let u = solve_dirichlet(&path(3), &bc).unwrap();
        assert_eq!(u[0], 1.0);
        assert_eq!(u[2], 0.0);
        assert!((u[1] - 0.5).abs() < 1e-14);
        let w = dirichlet_via_equilibrium(&path(3), &bc).unwrap();
        assert!((w[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gamblers_ruin() {
        let bc = BoundaryCondition::new(4, vec![0], vec![3]).unwrap();
        let u = solve_dirichlet(&path(4), &bc).unwrap();
        assert!((u[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!((u[2] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn equilibrium_small() {
        let v = equilibrium_measure(&path(3), &[1]).unwrap();
        assert!((v[1] - 0.5).abs() < 1e-15 && v[0] == 0.0 && v[2] == 0.0);
        let v = equilibrium_measure(&Graph::complete(3), &[0]).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-15 && v[1] == 0.0 && v[2] == 0.0);
        assert!(matches!(
            equilibrium_measure(&path(3), &[0, 1, 2]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn all_ones_boundary_gives_one() {
        let g = path(5);
        let bc = BoundaryCondition::new(5, vec![0, 4], vec![]).unwrap();
        let u = solve_dirichlet(&g, &bc).unwrap();
        assert!(u.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let w = dirichlet_via_equilibrium(&g, &bc).unwrap();
        assert!(w.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn unbounded_component_is_singular() {
        let g = Graph::from_edge_list(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let bc = BoundaryCondition::new(5, vec![0], vec![2]).unwrap();
        let err = solve_dirichlet(&g, &bc).unwrap_err();
        assert!(matches!(err, Error::Singular(ref m) if m.contains("node 3")), "{err}");
    }

    #[test]
    fn boundary_validation() {
        assert!(BoundaryCondition::new(3, vec![], vec![1]).is_err());
        assert!(BoundaryCondition::new(3, vec![1], vec![1]).is_err());
        assert!(BoundaryCondition::new(3, vec![3], vec![]).is_err());
    }

    #[test]
    fn rw_path_rows() {
        let known = [Some(0), None, None, Some(1)];
        let out = rw_probabilities(&path(4), &known, 2).unwrap();
        let d = &out.distribution;
        assert!((d.row(1)[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((d.row(1)[1] - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(d.row(0), &[1.0, 0.0]);
        assert_eq!(d.row(3), &[0.0, 1.0]);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn rw_all_labelled() {
        let known = [Some(2), Some(0), Some(1)];
        let d = rw_probabilities(&path(3), &known, 3).unwrap().distribution;
        assert_eq!(rw_classify(&d), vec![2, 0, 1]);
        assert_eq!(d, LabelDistribution::one_hot(&[2, 0, 1], 3));
    }

    #[test]
    fn rw_unlabelled_component_is_uniform() {
        let g = Graph::from_edge_list(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let known = [Some(0), None, Some(1), None, None];
        let out = rw_probabilities(&g, &known, 2).unwrap();
        assert_eq!(out.uncovered, vec![3, 4]);
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.distribution.row(4), &[0.5, 0.5]);
        assert!((out.distribution.row(1)[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rw_input_errors() {
        assert!(rw_probabilities(&path(3), &[None, None, None], 2).is_err());
        assert!(rw_probabilities(&path(3), &[Some(2), None, None], 2).is_err());
        assert!(rw_probabilities(&path(3), &[Some(0)], 2).is_err());
    }
}
