//! Serialisation of command results: a versioned JSON envelope with floats
//! printed to 17 significant digits, fixed-header CSV and SVG heatmaps.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;

use resonance_core::determinants::ModelSpec;
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

pub const SCHEMA: &str = "resonance-atlas/1";

#[derive(SerializeDerive, Deserialize, Debug, Clone, PartialEq)]
pub struct Envelope<T> {
    pub schema: String,
    pub command: String,
    pub model: Option<ModelSpec>,
    pub data: T,
}

impl<T> Envelope<T> {
    pub fn new(command: &str, model: Option<ModelSpec>, data: T) -> Self {
        Self { schema: SCHEMA.to_string(), command: command.to_string(), model, data }
    }
}

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
struct Precise(PrettyFormatter<'static>);

impl Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub const LOG_CLIP: f64 = 50.0;

/// One grid sample: position, clipped `ln |D|` and principal `arg D`.
#[derive(SerializeDerive, Deserialize, Debug, Clone, Copy, PartialEq)]
pub struct AtlasPoint {
    pub re: f64,
    pub im: f64,
    pub log_abs: f64,
    pub arg: f64,
}

#[derive(SerializeDerive, Deserialize, Debug, Clone, PartialEq)]
pub struct Atlas {
    pub columns: usize,
    pub rows: usize,
    /// Row-major, `im` increasing between rows, `re` within a row.
    pub points: Vec<AtlasPoint>,
}

pub fn atlas_csv(points: &[AtlasPoint]) -> String {
    let mut out = String::from("re,im,log_abs,arg\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(p.re), fmt_f64(p.im), fmt_f64(p.log_abs), fmt_f64(p.arg));
    }
    out
}

/// CSV with the given header from rows of numbers.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> (u8, u8, u8) {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h * 6.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - 0.5 * c;
    let q = |v: f64| ((v + m).clamp(0.0, 1.0) * 255.0).round() as u8;
    (q(r), q(g), q(b))
}

/// Phase portrait: hue follows `arg D` around the colour wheel, lightness
/// follows `ln |D|`. Runs of equal colour within a row share one rectangle.
pub fn atlas_svg(atlas: &Atlas) -> String {
    let (w, h) = (atlas.columns, atlas.rows);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
    );
    for row in 0..h {
        // top of the image is the largest imaginary part
        let y = h - 1 - row;
        let mut col = 0;
        while col < w {
            let colour = |c: usize| {
                let p = atlas.points[row * w + c];
                let hue = ((p.arg + PI) / (2.0 * PI) * 64.0).floor() / 64.0;
                let light = 0.25 + 0.5 / (1.0 + (-p.log_abs / 4.0).exp());
                hsl_to_rgb(hue.rem_euclid(1.0), 0.9, (light * 8.0).round() / 8.0)
            };
            let c0 = colour(col);
            let mut end = col + 1;
            while end < w && colour(end) == c0 {
                end += 1;
            }
            let _ = writeln!(
                out,
                r##"<rect x="{col}" y="{y}" width="{}" height="1" fill="#{:02x}{:02x}{:02x}"/>"##,
                end - col,
                c0.0,
                c0.1,
                c0.2
            );
            col = end;
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn envelope_json_parses_back() {
        let env = Envelope::new("eval", None, vec![0.1f64, 1e-17, -3.0]);
        let text = to_json(&env).unwrap();
        assert!(text.contains("\"schema\": \"resonance-atlas/1\""));
        let back: Envelope<Vec<f64>> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, env);
    }

    #[test]
    fn palette_is_cyclic() {
        assert_eq!(hsl_to_rgb(0.0, 1.0, 0.5), (255, 0, 0));
        assert_eq!(hsl_to_rgb(0.999_999, 1.0, 0.5), (255, 0, 0));
        assert_eq!(hsl_to_rgb(1.0 / 3.0, 1.0, 0.5), (0, 255, 0));
    }
}
