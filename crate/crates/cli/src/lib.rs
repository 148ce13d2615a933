pub mod cli_reporting;
