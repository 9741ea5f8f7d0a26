//! C ABI surface; populated in a later pass.
