//! YUV4MPEG2 reading and writing, 4:2:0 only.
//!
//! The stream header must carry width, height, and frame rate. Colorspace
//! tags in the C420 family (`C420`, `C420jpeg`, `C420mpeg2`, `C420paldv`)
//! are accepted and treated identically; anything else is rejected. Frame
//! headers may carry parameters after `FRAME`; they are ignored.

use std::io::{BufRead, Write};

use crate::error::{CodecError, Result};
use crate::frame::{FrameRate, SequenceHeader, VideoFrame};

const MAGIC: &str = "YUV4MPEG2";

/// Reads an entire 4:2:0 Y4M stream into memory.
pub fn read_y4m<R: BufRead>(mut input: R) -> Result<(SequenceHeader, Vec<VideoFrame>)> {
    let line = read_header_line(&mut input)?;
    let mut fields = line.split(' ');
    let magic = fields.next().unwrap_or("");
    if magic != MAGIC {
        return Err(CodecError::MalformedHeader(format!(
            "expected {MAGIC}, got {magic:?}"
        )));
    }

    let mut width = None;
    let mut height = None;
    let mut rate = None;
    for field in fields {
        let (tag, value) = match field.split_at_checked(1) {
            Some(split) => split,
            None => continue,
        };
        match tag {
            "W" => width = Some(parse_dim(value, "width")?),
            "H" => height = Some(parse_dim(value, "height")?),
            "F" => rate = Some(parse_rate(value)?),
            "C" => check_colorspace(value)?,
            // Interlacing, aspect, and extension fields carry nothing we use.
            _ => {}
        }
    }

    let width = width.ok_or_else(|| CodecError::MalformedHeader("missing W field".into()))?;
    let height = height.ok_or_else(|| CodecError::MalformedHeader("missing H field".into()))?;
    let rate = rate.ok_or_else(|| CodecError::MalformedHeader("missing F field".into()))?;
    if width % 2 != 0 || height % 2 != 0 {
        return Err(CodecError::BadDimensions { width, height });
    }

    let frame_bytes = VideoFrame::frame_size_bytes(width, height);
    let mut frames = Vec::new();
    loop {
        let line = match try_read_frame_line(&mut input)? {
            Some(line) => line,
            None => break,
        };
        if line != "FRAME" && !line.starts_with("FRAME ") {
            return Err(CodecError::MalformedHeader(format!(
                "expected FRAME marker, got {:?}",
                truncate_for_display(&line)
            )));
        }
        let mut data = vec![0u8; frame_bytes];
        read_exact_or_truncated(&mut input, &mut data, frames.len(), frame_bytes)?;
        frames.push(VideoFrame::from_planar(width, height, &data, frames.len())?);
    }

    let mut header = SequenceHeader::new(width, height, rate);
    header.frame_count = frames.len() as u32;
    Ok((header, frames))
}

/// Writes frames as a 4:2:0 Y4M stream with a `C420` tag.
pub fn write_y4m<W: Write>(
    mut output: W,
    header: &SequenceHeader,
    frames: &[VideoFrame],
) -> Result<()> {
    writeln!(
        output,
        "{MAGIC} W{} H{} F{}:{} Ip A1:1 C420",
        header.width, header.height, header.frame_rate.num, header.frame_rate.den
    )?;
    for frame in frames {
        writeln!(output, "FRAME")?;
        output.write_all(&frame.plane_y)?;
        output.write_all(&frame.plane_u)?;
        output.write_all(&frame.plane_v)?;
    }
    output.flush()?;
    Ok(())
}

fn parse_dim(value: &str, name: &str) -> Result<u32> {
    value
        .parse::<u32>()
        .ok()
        .filter(|&v| v > 0)
        .ok_or_else(|| CodecError::MalformedHeader(format!("bad {name} {value:?}")))
}

fn parse_rate(value: &str) -> Result<FrameRate> {
    let (num, den) = value
        .split_once(':')
        .ok_or_else(|| CodecError::MalformedHeader(format!("bad frame rate {value:?}")))?;
    let num = num.parse::<u32>().ok();
    let den = den.parse::<u32>().ok();
    match (num, den) {
        (Some(num), Some(den)) if num > 0 && den > 0 => Ok(FrameRate { num, den }),
        _ => Err(CodecError::MalformedHeader(format!(
            "bad frame rate {value:?}"
        ))),
    }
}

fn check_colorspace(value: &str) -> Result<()> {
    match value {
        "420" | "420jpeg" | "420mpeg2" | "420paldv" => Ok(()),
        other => Err(CodecError::UnsupportedColorspace(format!("C{other}"))),
    }
}

fn read_header_line<R: BufRead>(input: &mut R) -> Result<String> {
    let mut buf = Vec::new();
    input.read_until(b'\n', &mut buf)?;
    if buf.last() != Some(&b'\n') {
        return Err(CodecError::MalformedHeader(
            "stream header not terminated by newline".into(),
        ));
    }
    buf.pop();
    String::from_utf8(buf)
        .map_err(|_| CodecError::MalformedHeader("stream header is not valid UTF-8".into()))
}

/// Reads a frame marker line, or `None` at a clean end of stream.
fn try_read_frame_line<R: BufRead>(input: &mut R) -> Result<Option<String>> {
    let mut buf = Vec::new();
    input.read_until(b'\n', &mut buf)?;
    if buf.is_empty() {
        return Ok(None);
    }
    if buf.last() != Some(&b'\n') {
        return Err(CodecError::MalformedHeader(
            "frame marker not terminated by newline".into(),
        ));
    }
    buf.pop();
    String::from_utf8(buf)
        .map(Some)
        .map_err(|_| CodecError::MalformedHeader("frame marker is not valid UTF-8".into()))
}

fn read_exact_or_truncated<R: BufRead>(
    input: &mut R,
    buf: &mut [u8],
    frame: usize,
    expected: usize,
) -> Result<()> {
    let mut got = 0;
    while got < buf.len() {
        let n = input.read(&mut buf[got..])?;
        if n == 0 {
            return Err(CodecError::TruncatedFrame {
                frame,
                expected,
                got,
            });
        }
        got += n;
    }
    Ok(())
}

fn truncate_for_display(s: &str) -> String {
    s.chars().take(32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn round_trip_preserves_planes_and_metadata() {
        let mut header = SequenceHeader::new(32, 16, FrameRate { num: 30, den: 1 });
        header.frame_count = 3;
        let frames: Vec<VideoFrame> = (0..3usize)
            .map(|i| {
                let mut data = vec![0u8; VideoFrame::frame_size_bytes(32, 16)];
                for (j, b) in data.iter_mut().enumerate() {
                    *b = ((i * 37 + j * 11) % 256) as u8;
                }
                VideoFrame::from_planar(32, 16, &data, i).unwrap()
            })
            .collect();

        let mut out = Vec::new();
        write_y4m(&mut out, &header, &frames).unwrap();
        let (header2, frames2) = read_y4m(Cursor::new(&out)).unwrap();

        assert_eq!(header2.width, 32);
        assert_eq!(header2.height, 16);
        assert_eq!(header2.frame_rate, FrameRate { num: 30, den: 1 });
        assert_eq!(frames2.len(), 3);
        for (a, b) in frames.iter().zip(&frames2) {
            assert_eq!(a.plane_y, b.plane_y);
            assert_eq!(a.plane_u, b.plane_u);
            assert_eq!(a.plane_v, b.plane_v);
        }
    }

    #[test]
    fn accepts_c420_family_tags() {
        for tag in ["C420", "C420jpeg", "C420mpeg2", "C420paldv"] {
            let mut out = Vec::new();
            out.extend_from_slice(format!("YUV4MPEG2 W4 H4 F25:1 {tag}\n").as_bytes());
            out.extend_from_slice(b"FRAME\n");
            out.extend_from_slice(&[128u8; 24]);
            let (header, frames) = read_y4m(Cursor::new(&out)).unwrap();
            assert_eq!((header.width, header.height), (4, 4));
            assert_eq!(frames.len(), 1);
        }
    }

    #[test]
    fn rejects_non_420_colorspace() {
        let data = b"YUV4MPEG2 W4 H4 F25:1 C444\n";
        let err = read_y4m(Cursor::new(&data[..])).unwrap_err();
        assert!(matches!(err, CodecError::UnsupportedColorspace(tag) if tag == "C444"));
    }

    #[test]
    fn rejects_missing_fields() {
        let data = b"YUV4MPEG2 W4 F25:1\n";
        let err = read_y4m(Cursor::new(&data[..])).unwrap_err();
        assert!(matches!(err, CodecError::MalformedHeader(_)));
    }

    #[test]
    fn rejects_bad_magic() {
        let data = b"YUV4MPEG3 W4 H4 F25:1\n";
        let err = read_y4m(Cursor::new(&data[..])).unwrap_err();
        assert!(matches!(err, CodecError::MalformedHeader(_)));
    }

    #[test]
    fn reports_truncated_frame_payload() {
        let mut data = Vec::new();
        data.extend_from_slice(b"YUV4MPEG2 W4 H4 F25:1\n");
        data.extend_from_slice(b"FRAME\n");
        data.extend_from_slice(&[128u8; 10]);
        let err = read_y4m(Cursor::new(&data)).unwrap_err();
        match err {
            CodecError::TruncatedFrame {
                frame,
                expected,
                got,
            } => {
                assert_eq!(frame, 0);
                assert_eq!(expected, 24);
                assert_eq!(got, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn frame_parameters_are_ignored() {
        let mut data = Vec::new();
        data.extend_from_slice(b"YUV4MPEG2 W4 H4 F25:1 C420jpeg\n");
        data.extend_from_slice(b"FRAME Xsomething\n");
        data.extend_from_slice(&[90u8; 24]);
        let (_, frames) = read_y4m(Cursor::new(&data)).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].plane_y, vec![90u8; 16]);
    }
}
