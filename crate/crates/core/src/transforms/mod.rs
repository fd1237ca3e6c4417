//! Push-out transforms g with the derived fields s and d, and charts h of indicator regions,
//! including the coordinate-by-coordinate inventory chart.

mod chart;
mod region;
mod transform;

pub use chart::{
    build_inventory_chart, chart_contains, DomainChart, InventoryChart, LinearChart, LogShiftCoordinate,
    MonotoneCoordinate,
};
pub use region::{Bound, OuterFunction, Polynomial, RegionU, SumBelow};
pub use transform::{d_scalar, s_vector, LinearScale, LogShift, Shift, Transform};
