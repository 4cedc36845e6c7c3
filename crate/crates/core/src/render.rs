//! SVG figures. The view box is sized from the reach bound `1 / (rho - 1)`
//! around the finger's origin, and the y axis points up.

use std::fmt::Write;

use crate::grasp::GraspReport;
use crate::hand::SceneReport;
use crate::model::{Circle, Configuration, FingerSpec, Vec2};
use crate::reach::ReachableCloud;

const MARGIN: f64 = 1.1;

#[derive(Clone, Copy, Debug)]
struct View {
    center: Vec2,
    half: f64,
}

impl View {
    fn for_spec(spec: &FingerSpec) -> Self {
        View {
            center: spec.origin,
            half: spec.reach_bound() * MARGIN,
        }
    }

    fn stroke(&self) -> f64 {
        self.half / 300.0
    }
}

fn header(width: f64, height: f64, min_x: f64, min_y: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{min_x:.6} {min_y:.6} {width:.6} {height:.6}\" width=\"600\" height=\"{:.0}\">\n<!-- betahand {} -->\n",
        600.0 * height / width,
        env!("CARGO_PKG_VERSION")
    )
}

fn single(view: View, body: &str) -> String {
    let mut out = header(2.0 * view.half, 2.0 * view.half, view.center.x - view.half, -view.center.y - view.half);
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    out.push_str(body);
    out.push_str("</g>\n</svg>\n");
    out
}

fn polyline(points: &[Vec2], stroke: f64, color: &str) -> String {
    let pts: Vec<String> = points.iter().map(|p| format!("{:.6},{:.6}", p.x, p.y)).collect();
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke:.6}\"/>\n",
        pts.join(" ")
    )
}

fn circle(c: &Circle, stroke: f64, color: &str) -> String {
    format!(
        "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke:.6}\"/>\n",
        c.center.x, c.center.y, c.radius
    )
}

fn dot(p: &Vec2, r: f64, color: &str) -> String {
    format!("<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{r:.6}\" fill=\"{color}\"/>\n", p.x, p.y)
}

fn finger_body(config: &Configuration, stroke: f64) -> String {
    let mut body = polyline(&config.junctions, stroke, "black");
    for p in &config.junctions {
        body.push_str(&dot(p, 1.5 * stroke, "black"));
    }
    body
}

pub fn cloud_svg(cloud: &ReachableCloud) -> String {
    let view = View::for_spec(&cloud.spec);
    let mut body = String::new();
    for p in &cloud.points {
        body.push_str(&dot(p, view.stroke(), "steelblue"));
    }
    single(view, &body)
}

pub fn hull_svg(cloud: &ReachableCloud, hull: &[Vec2]) -> String {
    let view = View::for_spec(&cloud.spec);
    let mut body = String::new();
    for p in &cloud.points {
        body.push_str(&dot(p, view.stroke() / 2.0, "lightsteelblue"));
    }
    let mut closed = hull.to_vec();
    if let Some(first) = hull.first() {
        closed.push(*first);
    }
    body.push_str(&polyline(&closed, view.stroke(), "crimson"));
    single(view, &body)
}

pub fn configuration_svg(config: &Configuration, object: Option<&Circle>) -> String {
    let view = View::for_spec(&config.spec);
    let mut body = finger_body(config, view.stroke());
    if let Some(c) = object {
        body.push_str(&circle(c, view.stroke(), "crimson"));
    }
    single(view, &body)
}

fn grasp_body(config: &Configuration, report: &GraspReport, stroke: f64) -> String {
    let mut body = finger_body(config, stroke);
    body.push_str(&circle(&report.circle, stroke, "crimson"));
    for (p, a) in report.contacts.points.iter().zip(&report.alphas) {
        let color = if *a > 0.0 { "darkorange" } else { "gray" };
        body.push_str(&dot(p, 2.0 * stroke, color));
    }
    body
}

pub fn grasp_svg(config: &Configuration, report: &GraspReport) -> String {
    let view = View::for_spec(&config.spec);
    single(view, &grasp_body(config, report, view.stroke()))
}

pub fn family_svg(spec: &FingerSpec, reports: &[GraspReport]) -> String {
    let view = View::for_spec(spec);
    let mut body = String::new();
    for r in reports {
        body.push_str(&circle(&r.circle, view.stroke(), "crimson"));
    }
    single(view, &body)
}

/// One panel per grasping finger, side by side.
pub fn scene_svg(scene: &SceneReport, fingers: &[(Configuration, f64)]) -> String {
    let Some((first, _)) = fingers.first() else {
        return single(View { center: Vec2::zeros(), half: 1.0 }, "");
    };
    let view = View::for_spec(&first.spec);
    let side = 2.0 * view.half;
    let mut out = header(side * fingers.len() as f64, side, 0.0, 0.0);
    for (i, ((config, z), f)) in fingers.iter().zip(&scene.fingers).enumerate() {
        let v = View::for_spec(&config.spec);
        let _ = writeln!(
            out,
            "<g transform=\"translate({:.6},{:.6}) scale(1,-1) translate({:.6},{:.6})\">",
            i as f64 * side + view.half,
            view.half,
            -v.center.x,
            -v.center.y
        );
        let _ = writeln!(out, "<!-- finger {} on z = {z} -->", f.finger);
        out.push_str(&grasp_body(config, &f.report, v.stroke()));
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Drops the version comment so two renderings can be compared.
pub fn strip_version(svg: &str) -> String {
    svg.lines()
        .filter(|l| !l.starts_with("<!-- betahand"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::enumerate_reachable;

    #[test]
    fn view_box_from_reach_bound() {
        let cloud = enumerate_reachable(&FingerSpec::canonical(2.0, 1.0), 1, 1e-9).unwrap();
        let svg = cloud_svg(&cloud);
        assert!(svg.contains("viewBox=\"-1.100000 -1.100000 2.200000 2.200000\""));
        assert!(svg.contains("<!-- betahand"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(!strip_version(&svg).contains("betahand"));
    }
}
