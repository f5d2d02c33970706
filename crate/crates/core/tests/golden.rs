//! Golden SVG for the four-point example. Set `QQFDR_BLESS=1` to rewrite
//! the committed file after an intentional rendering change.

use std::path::PathBuf;

use qqfdr::*;

fn four_point_svg() -> Vec<u8> {
    let set = PValueSet::from_pvalues(vec![0.04, 0.005, 0.03, 0.01]).unwrap();
    let o = order_tests(&set);
    let model = build_plot_model(&o, &q_values(&o), 0.05, &[]).unwrap();
    render_svg(&model, &RenderOptions::default()).unwrap()
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/four_point.svg")
}

#[test]
fn four_point_matches_golden() {
    let svg = four_point_svg();
    let path = golden_path();
    if std::env::var_os("QQFDR_BLESS").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let golden = std::fs::read(&path).expect("golden file present");
    assert!(
        golden == svg,
        "rendered SVG differs from {}",
        path.display()
    );
}
