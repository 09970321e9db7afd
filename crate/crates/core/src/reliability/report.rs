use crate::mesh::ElementId;
use crate::sum::CompensatedSum;

use super::FaceContribution;

#[derive(Debug, Clone, PartialEq)]
pub struct TopFaceEntry {
    /// 1-based position after sorting by density.
    pub rank: usize,
    pub element_id: ElementId,
    pub face: usize,
    pub density: f64,
    pub hazard: f64,
    /// PoF at `n` of the faces ranked `1..=rank` together.
    pub combined_pof: f64,
    /// Fraction of the total hazard held by faces `1..=rank`.
    pub cumulative_share: f64,
}

/// Ranks faces by crack-initiation density, highest first, ties broken by
/// `(element_id, face)`, with running PoF and hazard share at `n` cycles.
pub fn top_faces_report(faces: &[FaceContribution], n: f64, m: f64) -> Vec<TopFaceEntry> {
    let mut order: Vec<&FaceContribution> = faces.iter().collect();
    order.sort_by(|a, b| {
        b.density()
            .total_cmp(&a.density())
            .then_with(|| (a.element_id, a.face).cmp(&(b.element_id, b.face)))
    });
    let mut prefix = Vec::with_capacity(order.len());
    let mut acc = CompensatedSum::new();
    for f in &order {
        acc.add(f.hazard);
        prefix.push(acc.value());
    }
    let total = prefix.last().copied().unwrap_or(0.0);
    let nm = n.powf(m);
    order
        .iter()
        .zip(prefix)
        .enumerate()
        .map(|(i, (f, partial))| TopFaceEntry {
            rank: i + 1,
            element_id: f.element_id,
            face: f.face,
            density: f.density(),
            hazard: f.hazard,
            combined_pof: -(-nm * partial).exp_m1(),
            cumulative_share: if total > 0.0 { partial / total } else { 0.0 },
        })
        .collect()
}
