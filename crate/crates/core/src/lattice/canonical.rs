//! Canonical codes of labeled planar maps, used to compare networks.

use std::collections::{HashMap, VecDeque};

use super::{Dart, HoneycombNet};

/// Breadth-first code of the smoothed network, minimized over start darts.
/// Free ends count as leaf nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(Vec<i64>);

pub(crate) fn canonical_form(net: &HoneycombNet) -> CanonicalForm {
    let s = net.smoothed();
    let mut darts: Vec<Vec<Dart>> = s.vertices.iter().map(|v| v.rotation.clone()).collect();
    for o in &s.open_ends {
        darts.push(vec![Dart {
            edge: o.edge,
            end: o.end,
        }]);
    }
    let mut at: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (node, ds) in darts.iter().enumerate() {
        for (i, d) in ds.iter().enumerate() {
            at.insert((d.edge, d.end), (node, i));
        }
    }
    let label: Vec<[i64; 3]> = s
        .edges
        .iter()
        .map(|e| {
            [
                e.label.letter as i64,
                e.label.level as i64,
                e.label.position as i64,
            ]
        })
        .collect();

    let code_from = |start: usize, first: usize| -> Vec<i64> {
        let mut num = vec![usize::MAX; darts.len()];
        let mut queue = VecDeque::from([(start, first)]);
        num[start] = 0;
        let mut next = 1;
        let mut code = Vec::new();
        while let Some((x, s0)) = queue.pop_front() {
            let rot = &darts[x];
            code.push(rot.len() as i64);
            for t in 0..rot.len() {
                let d = rot[(s0 + t) % rot.len()];
                let (y, iy) = at[&(d.edge, 1 - d.end)];
                if num[y] == usize::MAX {
                    num[y] = next;
                    next += 1;
                    queue.push_back((y, iy));
                }
                code.push(num[y] as i64);
                code.extend(label[d.edge]);
            }
        }
        // components not reached from the start still count toward the size
        code.push(-((darts.len() - next) as i64));
        code
    };

    let best = (0..darts.len())
        .flat_map(|x| (0..darts[x].len()).map(move |i| (x, i)))
        .map(|(x, i)| code_from(x, i))
        .min()
        .unwrap_or_default();
    CanonicalForm(best)
}
