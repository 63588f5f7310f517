//! placeholder
pub struct RunConfig;
pub enum SchemeSel { All }
pub enum OutputFormat { Csv, Json }
