pub mod densela;
pub mod partialmat;
pub mod solver;
pub mod oracle;
pub mod cli;
