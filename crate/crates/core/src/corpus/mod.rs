//! Paper metadata, research areas, seed sets, and the citation graph.

mod areas;
mod graph;
mod paper;

pub use areas::{
    build_seed_set, normalize_venue, read_labels, read_labels_file, write_labels, Area, AreaSet, SeedLookup, SeedSet,
    VenueMap, DEFAULT_AREA_MAP,
};
pub use graph::CitationGraph;
pub use paper::{
    ingest_papers, read_papers_file, reconstruct_inverted, write_papers, IngestReport, LineError, Paper, RecordSchema,
};
