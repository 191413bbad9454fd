//! Binary-tree directional filter bank.
//!
//! Every node of the tree is a two-channel quincunx filter bank with fan
//! kernels (the 9-7 pair mapped to 2-D by a McClellan transform and
//! modulated by `(pi, 0)`). Channel 0 keeps the quincunx coset through the
//! origin, channel 1 the coset through `(1, 0)`.
//!
//! Signals live on a discrete torus `Z^2 / L`. The root lattice `L` is the
//! rectangular period of the input band; the child of a split sampled by the
//! integer matrix `E` (parent point `p = E m`) has period lattice
//! `E^-1 L`. Each torus is stored on its Hermite-normal-form fundamental
//! domain, an `a x c` rectangle whose row wrap is offset by `b` columns. The
//! change of lattice basis from one level to the next is the shearing
//! resampling of the filter bank: a pure reordering of samples.
//!
//! In child coordinates the passband of every node below the root occupies a
//! pair of opposite quadrants, so the fan split of the next level halves its
//! wedge. The sampling matrices are picked per half-quadrant to map the child
//! wedge back onto a quadrant pair. After `k` levels there are `2^k`
//! subbands; [`dfb_analyze`] returns them sorted by the orientation angle of
//! their passband center in `[0, pi)`, measured from the column-frequency
//! axis (horizontal frequency) towards the row-frequency axis.

use alloc::vec;
use alloc::vec::Vec;

use crate::filters::{fan_kernels, FilterSet};
use crate::{Band, Error, Result};

pub const MAX_DEPTH: usize = 4;

/// `2^k` directional subbands of one band, in angular order.
#[derive(Debug, Clone, PartialEq)]
pub struct DfbDecomposition {
    pub depth: usize,
    /// Shape of the analyzed band.
    pub rows: usize,
    pub cols: usize,
    pub subbands: Vec<Band>,
}

impl DfbDecomposition {
    pub fn coefficient_count(&self) -> usize {
        self.subbands.iter().map(Band::len).sum()
    }
}

type Mat = [[i64; 2]; 2];

const IDENTITY: Mat = [[1, 0], [0, 1]];
const ROOT_SPLIT: Mat = [[1, 1], [1, -1]];
// Half-quadrant wedges back onto quadrant pairs. Names give the wedge.
const AXIS_R_DIAG: Mat = [[1, 0], [-1, 2]];
const DIAG_AXIS_C: Mat = [[2, -1], [0, 1]];
const AXIS_R_ANTI: Mat = [[1, 0], [1, 2]];
const ANTI_AXIS_C: Mat = [[2, 1], [0, 1]];

const CHANNEL_OFFSETS: [(i64, i64); 2] = [(0, 0), (1, 0)];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Wedge {
    Full,
    /// Passband on the quadrants where `w_r * w_c > 0`.
    Positive,
    /// Passband on the quadrants where `w_r * w_c < 0`.
    Negative,
}

impl Wedge {
    fn split(self) -> [(Mat, Wedge); 2] {
        match self {
            Wedge::Full => [(ROOT_SPLIT, Wedge::Positive), (ROOT_SPLIT, Wedge::Negative)],
            Wedge::Positive => [
                (AXIS_R_DIAG, Wedge::Positive),
                (DIAG_AXIS_C, Wedge::Positive),
            ],
            Wedge::Negative => [
                (AXIS_R_ANTI, Wedge::Negative),
                (ANTI_AXIS_C, Wedge::Negative),
            ],
        }
    }

    fn center(self) -> (f64, f64) {
        match self {
            Wedge::Full | Wedge::Positive => (1.0, 1.0),
            Wedge::Negative => (1.0, -1.0),
        }
    }
}

/// Period lattice generated by `(a, b)` and `(0, c)` as `(row, col)` vectors,
/// stored as an `a x c` rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Torus {
    a: i64,
    b: i64,
    c: i64,
}

impl Torus {
    fn rect(rows: usize, cols: usize) -> Self {
        Self {
            a: rows as i64,
            b: 0,
            c: cols as i64,
        }
    }

    #[inline]
    fn len(&self) -> usize {
        (self.a * self.c) as usize
    }

    #[inline]
    fn wrap(&self, r: i64, col: i64) -> usize {
        let k = r.div_euclid(self.a);
        let rr = r - k * self.a;
        let cc = (col - k * self.b).rem_euclid(self.c);
        (rr * self.c + cc) as usize
    }

    /// Lattice of the sub-sampled signal `m -> p = E m`, or `None` if the
    /// period lattice is not contained in `E Z^2`.
    fn child(&self, e: &Mat) -> Option<Torus> {
        let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        let inv = |v: (i64, i64)| -> Option<(i64, i64)> {
            let r = e[1][1] * v.0 - e[0][1] * v.1;
            let c = -e[1][0] * v.0 + e[0][0] * v.1;
            if r % det != 0 || c % det != 0 {
                None
            } else {
                Some((r / det, c / det))
            }
        };
        let g1 = inv((self.a, self.b))?;
        let g2 = inv((0, self.c))?;
        hermite(g1, g2)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Hermite normal form of the lattice spanned by two `(row, col)` vectors.
fn hermite(g1: (i64, i64), g2: (i64, i64)) -> Option<Torus> {
    let (r1, r2) = (g1.0, g2.0);
    if r1 == 0 && r2 == 0 {
        return None;
    }
    let (mut a, mut x, mut y) = ext_gcd(r1, r2);
    if a < 0 {
        a = -a;
        x = -x;
        y = -y;
    }
    let bu = x * g1.1 + y * g2.1;
    let cw = (r2 / a) * g1.1 - (r1 / a) * g2.1;
    let c = cw.abs();
    if c == 0 {
        return None;
    }
    Some(Torus {
        a,
        b: bu.rem_euclid(c),
        c,
    })
}

#[derive(Debug, Clone)]
struct Leaf {
    torus: Torus,
    angle: f64,
}

/// Leaves in tree (depth-first, channel 0 first) order.
fn layout(rows: usize, cols: usize, depth: usize) -> Result<Vec<Leaf>> {
    if depth > MAX_DEPTH {
        return Err(Error::UnsupportedDepth(depth));
    }
    let mut leaves = Vec::with_capacity(1 << depth);
    walk_layout(
        Torus::rect(rows, cols),
        Wedge::Full,
        depth,
        IDENTITY,
        &mut leaves,
    )
    .ok_or(Error::IncompatibleDfbShape { rows, cols, depth })?;
    Ok(leaves)
}

fn walk_layout(
    torus: Torus,
    wedge: Wedge,
    remaining: usize,
    sampling: Mat,
    leaves: &mut Vec<Leaf>,
) -> Option<()> {
    if remaining == 0 {
        leaves.push(Leaf {
            torus,
            angle: passband_angle(&sampling, wedge),
        });
        return Some(());
    }
    for (e, child_wedge) in wedge.split() {
        let child = torus.child(&e)?;
        walk_layout(
            child,
            child_wedge,
            remaining - 1,
            mat_mul(&sampling, &e),
            leaves,
        )?;
    }
    Some(())
}

/// Orientation in `[0, pi)` of `D^-T u`, where `u` is the wedge center in
/// the leaf's own frequency coordinates.
fn passband_angle(d: &Mat, wedge: Wedge) -> f64 {
    let (u0, u1) = wedge.center();
    let det = (d[0][0] * d[1][1] - d[0][1] * d[1][0]) as f64;
    // D^-T = (1/det) [[d11, -d10], [-d01, d00]]
    let wr = (d[1][1] as f64 * u0 - d[1][0] as f64 * u1) / det;
    let wc = (-(d[0][1] as f64) * u0 + d[0][0] as f64 * u1) / det;
    let mut angle = libm::atan2(wr, wc);
    if angle < 0.0 {
        angle += core::f64::consts::PI;
    }
    if angle >= core::f64::consts::PI {
        angle -= core::f64::consts::PI;
    }
    angle
}

/// Position of each tree-order leaf in the angular output order.
fn angular_order(leaves: &[Leaf]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..leaves.len()).collect();
    idx.sort_by(|&i, &j| leaves[i].angle.total_cmp(&leaves[j].angle));
    idx
}

/// Both band dimensions must be multiples of this value for a split of the
/// given depth: 1 at depth 0, 2 at depths 1 and 2, then `2^(depth - 1)`.
pub fn required_divisor(depth: usize) -> usize {
    match depth {
        0 => 1,
        d => 1 << (d - 1).max(1),
    }
}

/// Checks that a `rows x cols` band can be split to `depth` levels.
pub fn check_shape(rows: usize, cols: usize, depth: usize) -> Result<()> {
    layout(rows, cols, depth).map(|_| ())
}

/// Shapes of the `2^depth` subbands for a `rows x cols` band, in output order.
pub fn subband_shapes(rows: usize, cols: usize, depth: usize) -> Result<Vec<(usize, usize)>> {
    let leaves = layout(rows, cols, depth)?;
    Ok(angular_order(&leaves)
        .into_iter()
        .map(|i| (leaves[i].torus.a as usize, leaves[i].torus.c as usize))
        .collect())
}

/// Passband center orientations (radians, `[0, pi)`) in output order.
pub fn subband_angles(depth: usize) -> Result<Vec<f64>> {
    let n = 1usize << depth.min(MAX_DEPTH);
    let leaves = layout(4 * n, 4 * n, depth)?;
    let mut angles: Vec<f64> = leaves.iter().map(|l| l.angle).collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

struct Kernels {
    analysis: [Vec<(i64, i64, f64)>; 2],
    synthesis: [Vec<(i64, i64, f64)>; 2],
}

impl Kernels {
    fn new(filters: &FilterSet) -> Self {
        let [a0, a1, s0, s1] = fan_kernels(filters);
        Self {
            analysis: [a0.nonzero_taps(), a1.nonzero_taps()],
            synthesis: [s0.nonzero_taps(), s1.nonzero_taps()],
        }
    }
}

pub fn dfb_analyze(band: &Band, depth: usize) -> Result<DfbDecomposition> {
    dfb_analyze_with(band, depth, &FilterSet::cdf97())
}

pub fn dfb_analyze_with(
    band: &Band,
    depth: usize,
    filters: &FilterSet,
) -> Result<DfbDecomposition> {
    let (rows, cols) = band.shape();
    let leaves = layout(rows, cols, depth)?;
    let kernels = Kernels::new(filters);
    let mut out = Vec::with_capacity(leaves.len());
    analyze_node(
        band.values().to_vec(),
        Torus::rect(rows, cols),
        Wedge::Full,
        depth,
        &kernels,
        &mut out,
    );
    let mut slots: Vec<Option<Vec<f64>>> = out.into_iter().map(Some).collect();
    let subbands = angular_order(&leaves)
        .into_iter()
        .map(|i| {
            let t = leaves[i].torus;
            Band::new(
                t.a as usize,
                t.c as usize,
                slots[i].take().expect("each leaf used once"),
            )
            .expect("leaf storage matches its torus")
        })
        .collect();
    Ok(DfbDecomposition {
        depth,
        rows,
        cols,
        subbands,
    })
}

fn analyze_node(
    x: Vec<f64>,
    torus: Torus,
    wedge: Wedge,
    remaining: usize,
    kernels: &Kernels,
    out: &mut Vec<Vec<f64>>,
) {
    if remaining == 0 {
        out.push(x);
        return;
    }
    for (channel, (e, child_wedge)) in wedge.split().into_iter().enumerate() {
        let child = torus.child(&e).expect("layout already validated");
        let (o_r, o_c) = CHANNEL_OFFSETS[channel];
        let taps = &kernels.analysis[channel];
        let mut y = Vec::with_capacity(child.len());
        for i in 0..child.a {
            for j in 0..child.c {
                let pr = e[0][0] * i + e[0][1] * j + o_r;
                let pc = e[1][0] * i + e[1][1] * j + o_c;
                let mut acc = 0.0;
                for &(dr, dc, v) in taps {
                    acc += v * x[torus.wrap(pr - dr, pc - dc)];
                }
                y.push(acc);
            }
        }
        analyze_node(y, child, child_wedge, remaining - 1, kernels, out);
    }
}

pub fn dfb_synthesize(dec: &DfbDecomposition) -> Result<Band> {
    dfb_synthesize_with(dec, &FilterSet::cdf97())
}

pub fn dfb_synthesize_with(dec: &DfbDecomposition, filters: &FilterSet) -> Result<Band> {
    let leaves = layout(dec.rows, dec.cols, dec.depth)?;
    if dec.subbands.len() != leaves.len() {
        return Err(Error::Structure(alloc::format!(
            "depth {} needs {} subbands, got {}",
            dec.depth,
            leaves.len(),
            dec.subbands.len()
        )));
    }
    let order = angular_order(&leaves);
    let mut tree_order: Vec<Option<&Band>> = vec![None; leaves.len()];
    for (pos, &leaf) in order.iter().enumerate() {
        let t = leaves[leaf].torus;
        let band = &dec.subbands[pos];
        band.expect_shape(t.a as usize, t.c as usize)?;
        tree_order[leaf] = Some(band);
    }
    let kernels = Kernels::new(filters);
    let mut next = tree_order
        .into_iter()
        .map(|b| b.expect("all leaves assigned"));
    let values = synthesize_node(
        Torus::rect(dec.rows, dec.cols),
        Wedge::Full,
        dec.depth,
        &kernels,
        &mut next,
    );
    Band::new(dec.rows, dec.cols, values)
}

fn synthesize_node<'a>(
    torus: Torus,
    wedge: Wedge,
    remaining: usize,
    kernels: &Kernels,
    leaves: &mut impl Iterator<Item = &'a Band>,
) -> Vec<f64> {
    if remaining == 0 {
        return leaves.next().expect("leaf count checked").values().to_vec();
    }
    let mut x = vec![0.0; torus.len()];
    for (channel, (e, child_wedge)) in wedge.split().into_iter().enumerate() {
        let child = torus.child(&e).expect("layout already validated");
        let y = synthesize_node(child, child_wedge, remaining - 1, kernels, leaves);
        let (o_r, o_c) = CHANNEL_OFFSETS[channel];
        let taps = &kernels.synthesis[channel];
        for i in 0..child.a {
            for j in 0..child.c {
                let v = y[(i * child.c + j) as usize];
                if v == 0.0 {
                    continue;
                }
                let qr = e[0][0] * i + e[0][1] * j + o_r;
                let qc = e[1][0] * i + e[1][1] * j + o_c;
                for &(dr, dc, t) in taps {
                    x[torus.wrap(qr + dr, qc + dc)] += t * v;
                }
            }
        }
    }
    x
}
