//! Skeleton topology from 8-neighbourhood patterns: endpoints, branching
//! points, simple points and the arcs between them.

use std::collections::{BTreeMap, BTreeSet};

use crate::grid::{PixelCoord, N8};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKind {
    Endpoint,
    Branching,
    Simple,
}

/// The class of every skeleton point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointClass {
    kinds: BTreeMap<PixelCoord, PointKind>,
}

impl PointClass {
    pub fn kind(&self, p: PixelCoord) -> Option<PointKind> {
        self.kinds.get(&p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PixelCoord, PointKind)> + '_ {
        self.kinds.iter().map(|(&p, &k)| (p, k))
    }

    fn of_kind(&self, kind: PointKind) -> impl Iterator<Item = PixelCoord> + '_ {
        self.iter().filter(move |&(_, k)| k == kind).map(|(p, _)| p)
    }

    pub fn endpoints(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.of_kind(PointKind::Endpoint)
    }

    pub fn branching(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.of_kind(PointKind::Branching)
    }

    pub fn simple(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.of_kind(PointKind::Simple)
    }

    pub fn is_terminal(&self, p: PixelCoord) -> bool {
        matches!(self.kind(p), Some(PointKind::Endpoint | PointKind::Branching))
    }

    /// `|E| + |B|`.
    pub fn complexity(&self) -> usize {
        self.kinds.values().filter(|&&k| k != PointKind::Simple).count()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }
}

fn neighbours(points: &BTreeSet<PixelCoord>, p: PixelCoord) -> Vec<PixelCoord> {
    N8.iter()
        .filter_map(|&(dx, dy)| p.offset(dx, dy))
        .filter(|q| points.contains(q))
        .collect()
}

/// Classify a single point from its skeleton neighbours.
///
/// Branching: at least three neighbours, no two of them 4-adjacent.
/// Endpoint: at most one neighbour; or two neighbours that are 8-adjacent to
/// each other; or three neighbours all in the row above, the row below, the
/// column to the left or the column to the right. Branching takes precedence.
pub fn classify_point(p: PixelCoord, nbrs: &[PixelCoord]) -> PointKind {
    let n = nbrs.len();
    let pairs = || {
        nbrs.iter()
            .enumerate()
            .flat_map(move |(i, &a)| nbrs[i + 1..].iter().map(move |&b| (a, b)))
    };
    if n >= 3 && !pairs().any(|(a, b)| a.is_4_adjacent(b)) {
        return PointKind::Branching;
    }
    let rel = |q: PixelCoord| (q.x as i64 - p.x as i64, q.y as i64 - p.y as i64);
    let endpoint = match n {
        0 | 1 => true,
        2 => nbrs[0].is_8_adjacent(nbrs[1]),
        3 => {
            let offs: Vec<(i64, i64)> = nbrs.iter().map(|&q| rel(q)).collect();
            offs.iter().all(|o| o.1 == -1)
                || offs.iter().all(|o| o.1 == 1)
                || offs.iter().all(|o| o.0 == -1)
                || offs.iter().all(|o| o.0 == 1)
        }
        _ => false,
    };
    if endpoint {
        PointKind::Endpoint
    } else {
        PointKind::Simple
    }
}

/// Classify every point of a skeleton by its 8-neighbourhood pattern.
pub fn classify_points(points: &BTreeSet<PixelCoord>) -> PointClass {
    let kinds = points
        .iter()
        .map(|&p| (p, classify_point(p, &neighbours(points, p))))
        .collect();
    PointClass { kinds }
}

/// A chain of 8-adjacent skeleton points whose inner points are simple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub pixels: Vec<PixelCoord>,
    /// Class of the first pixel.
    pub start: PointKind,
    /// Class of the last pixel.
    pub end: PointKind,
}

impl Arc {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn smallest_pixel(&self) -> PixelCoord {
        *self.pixels.iter().min().expect("arcs are non-empty")
    }

    pub fn has_endpoint(&self, classes: &PointClass) -> bool {
        self.pixels
            .iter()
            .any(|&p| classes.kind(p) == Some(PointKind::Endpoint))
    }

    /// Whether both ends are endpoints or branching points.
    pub fn is_terminated(&self) -> bool {
        self.start != PointKind::Simple && self.end != PointKind::Simple
    }
}

/// Arcs plus anything unusual met while tracing them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArcSet {
    pub arcs: Vec<Arc>,
    pub diagnostics: Vec<String>,
}

/// Trace the arcs of a skeleton.
///
/// Arcs start at every end- or branching point and follow simple points,
/// preferring 4-adjacent steps, until they meet another end- or branching
/// point. Two adjacent terminals form a two-pixel arc, an isolated point a
/// one-pixel arc. Simple points left over (closed loops) are traced into
/// unterminated arcs. Every simple point belongs to exactly one arc. Arcs are
/// ordered by their row-major smallest pixel.
pub fn extract_arcs(points: &BTreeSet<PixelCoord>, classes: &PointClass) -> ArcSet {
    let mut out = ArcSet::default();
    if has_thick_block(points) {
        out.diagnostics
            .push("skeleton is not one pixel wide; arcs are traced best-effort".into());
    }
    let kind = |p: PixelCoord| classes.kind(p).expect("classified point");
    let mut visited: BTreeSet<PixelCoord> = BTreeSet::new();

    for (t, t_kind) in classes.iter().filter(|&(p, _)| classes.is_terminal(p)) {
        let nbrs = ordered_neighbours(points, t);
        if nbrs.is_empty() {
            out.arcs.push(Arc {
                pixels: vec![t],
                start: t_kind,
                end: t_kind,
            });
            continue;
        }
        for n in nbrs {
            if classes.is_terminal(n) {
                if t < n {
                    out.arcs.push(Arc {
                        pixels: vec![t, n],
                        start: t_kind,
                        end: kind(n),
                    });
                }
            } else if visited.insert(n) {
                let pixels = trace(points, classes, &mut visited, vec![t, n]);
                let end = kind(*pixels.last().expect("non-empty trace"));
                if end == PointKind::Simple {
                    out.diagnostics
                        .push(format!("arc from {t} ends at simple point {}", pixels.last().unwrap()));
                }
                out.arcs.push(Arc {
                    pixels,
                    start: t_kind,
                    end,
                });
            }
        }
    }

    let leftovers: Vec<PixelCoord> = classes.simple().filter(|p| !visited.contains(p)).collect();
    for s in leftovers {
        if !visited.insert(s) {
            continue;
        }
        let pixels = trace(points, classes, &mut visited, vec![s]);
        out.diagnostics
            .push(format!("closed arc through {s} has no end- or branching point"));
        let end = kind(*pixels.last().expect("non-empty trace"));
        out.arcs.push(Arc {
            pixels,
            start: PointKind::Simple,
            end,
        });
    }

    out.arcs
        .sort_by(|a, b| (a.smallest_pixel(), &a.pixels).cmp(&(b.smallest_pixel(), &b.pixels)));
    out
}

/// Neighbours with 4-adjacent ones first, each group row-major.
fn ordered_neighbours(points: &BTreeSet<PixelCoord>, p: PixelCoord) -> Vec<PixelCoord> {
    let mut nbrs = neighbours(points, p);
    nbrs.sort_by_key(|&q| (!q.is_4_adjacent(p), q));
    nbrs
}

fn trace(
    points: &BTreeSet<PixelCoord>,
    classes: &PointClass,
    visited: &mut BTreeSet<PixelCoord>,
    mut path: Vec<PixelCoord>,
) -> Vec<PixelCoord> {
    let origin = path[0];
    loop {
        let cur = *path.last().expect("non-empty path");
        if path.len() > 1 && classes.is_terminal(cur) {
            return path;
        }
        let prev = (path.len() > 1).then(|| path[path.len() - 2]);
        let nbrs = ordered_neighbours(points, cur);
        // A terminal may close the arc, except stepping straight back.
        let terminal_ok = |q: PixelCoord| {
            classes.is_terminal(q) && Some(q) != prev && (q != origin || path.len() > 2)
        };
        let next = [true, false].iter().find_map(|&four| {
            nbrs.iter()
                .filter(|&&q| q.is_4_adjacent(cur) == four)
                .find(|&&q| terminal_ok(q))
                .or_else(|| {
                    nbrs.iter()
                        .filter(|&&q| q.is_4_adjacent(cur) == four)
                        .find(|&&q| !classes.is_terminal(q) && !visited.contains(&q))
                })
                .copied()
        });
        match next {
            Some(q) => {
                if !classes.is_terminal(q) {
                    visited.insert(q);
                }
                path.push(q);
            }
            None => return path,
        }
    }
}

fn has_thick_block(points: &BTreeSet<PixelCoord>) -> bool {
    points.iter().any(|&p| {
        [(1, 0), (0, 1), (1, 1)]
            .iter()
            .all(|&(dx, dy)| p.offset(dx, dy).is_some_and(|q| points.contains(&q)))
    })
}
