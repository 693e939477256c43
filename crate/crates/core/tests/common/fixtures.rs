use gitcurves::CurveGraph;

pub fn two_elliptic() -> CurveGraph {
    CurveGraph::builder()
        .vertex("v1", 1)
        .vertex("v2", 1)
        .node("v1", "v2")
        .build()
        .unwrap()
}

pub fn elliptic_loop() -> CurveGraph {
    CurveGraph::builder().vertex("v", 1).node("v", "v").build().unwrap()
}

pub fn elliptic_cusp() -> CurveGraph {
    CurveGraph::builder().cuspidal("v", 1, 1).build().unwrap()
}

pub fn smooth(genus: u32) -> CurveGraph {
    CurveGraph::builder().vertex("x", genus).build().unwrap()
}
