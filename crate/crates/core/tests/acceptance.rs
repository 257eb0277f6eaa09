use png_det::verify::{run, Mode};

fn main() {
    let mut passed = 0;
    let mut unexpected = Vec::new();
    for id in 1..=12 {
        let out = run(id, Mode::Full);
        println!("{}", out.line());
        if out.passed {
            passed += 1;
        } else if out.unexpected() {
            unexpected.push(id);
        }
    }
    println!("{passed} of 12 criteria passed");
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
