//! On-disk formats: track CSV, confusion CSV, DTN tensor files, EMB1
//! embedding streams, and bank JSON persistence.

pub mod bank;
pub mod confusion_csv;
pub mod embedding;
pub mod tensor;
pub mod track_csv;
