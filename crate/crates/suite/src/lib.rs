//! Holds the `acceptance` test target; the criteria live in
//! `fliess_kit::acceptance`.
