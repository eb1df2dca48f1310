use fliess_core::testing::DEFAULT_SEED;
use fliess_core::verify::run_all_criteria;

fn main() {
    let reports = run_all_criteria(DEFAULT_SEED);
    for r in &reports {
        println!("{}", r.line());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
