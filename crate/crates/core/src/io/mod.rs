//! Field files, JSON-lines record streams and CSV tables.

mod field_file;
mod tables;

pub use field_file::{
    read_field, read_field_binary, read_field_json, write_field_binary, write_field_json, FieldJson,
    HEADER_LEN, MAGIC, VERSION,
};
pub use tables::{write_norms_csv, write_plot_csv, write_records_csv, JsonlWriter, NormRow};
