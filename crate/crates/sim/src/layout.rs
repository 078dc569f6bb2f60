use serde::Serialize;
use sixdma_core::CellLayout;

/// One BS of the layout export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BsEntry {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Axial hex coordinates.
    pub aq: i32,
    pub ar: i32,
}

pub fn layout_entries(layout: &CellLayout) -> Vec<BsEntry> {
    layout
        .positions()
        .iter()
        .zip(layout.hex_coords())
        .enumerate()
        .map(|(index, (p, h))| BsEntry {
            index,
            x: p[0],
            y: p[1],
            z: p[2],
            aq: h.aq,
            ar: h.ar,
        })
        .collect()
}
