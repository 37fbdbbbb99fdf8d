pub mod automorphisms;
pub mod curvature;
pub mod deligne;
pub mod presentation;
pub mod reconstruction;
pub mod words;
