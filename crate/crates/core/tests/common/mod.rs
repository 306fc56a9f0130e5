pub mod checks;
pub mod oracles;
pub mod toys;
