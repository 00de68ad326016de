pub mod pairing;

pub mod order;

pub mod oracle;

pub mod dendroid;

pub mod dilator;

pub mod betalogic;

pub mod genedendron;

pub mod impdil;

pub mod notation;

pub use order::{DescendingWitness, IncreasingMap, LinearOrder, WfStatus};
