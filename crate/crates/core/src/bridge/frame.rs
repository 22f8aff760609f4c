use std::io::{ErrorKind, Read, Write};

use super::{BridgeError, Message};

/// Upper bound on a payload; a full 200 × 512 batch is a few MiB.
pub const MAX_FRAME_LEN: u32 = 256 * 1024 * 1024;

pub fn encode_frame(message: &Message) -> Vec<u8> {
    let payload = serde_json::to_vec(message).expect("protocol messages always serialize");
    let mut frame = Vec::with_capacity(payload.len() + 4);
    frame.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    frame.extend_from_slice(&payload);
    frame
}

/// Decodes one complete frame; trailing bytes are an error.
pub fn decode_frame(frame: &[u8]) -> Result<Message, BridgeError> {
    if frame.len() < 4 {
        return Err(BridgeError::Framing(format!(
            "truncated length prefix ({} of 4 bytes)",
            frame.len()
        )));
    }
    let len = u32::from_be_bytes(frame[..4].try_into().unwrap()) as usize;
    let payload = &frame[4..];
    if payload.len() < len {
        return Err(BridgeError::Framing(format!(
            "truncated payload ({} of {len} bytes)",
            payload.len()
        )));
    }
    if payload.len() > len {
        return Err(BridgeError::Framing(format!(
            "{} trailing bytes after payload",
            payload.len() - len
        )));
    }
    Message::from_payload(payload)
}

/// Reads one frame. `Ok(None)` means the stream ended cleanly before a new
/// frame started; ending anywhere inside a frame is a framing error.
pub fn read_frame<R: Read + ?Sized>(reader: &mut R) -> Result<Option<Message>, BridgeError> {
    let mut prefix = [0u8; 4];
    let got = read_full(reader, &mut prefix)?;
    if got == 0 {
        return Ok(None);
    }
    if got < 4 {
        return Err(BridgeError::Framing(format!(
            "truncated length prefix ({got} of 4 bytes)"
        )));
    }
    let len = u32::from_be_bytes(prefix);
    if len > MAX_FRAME_LEN {
        return Err(BridgeError::Framing(format!(
            "frame length {len} exceeds limit {MAX_FRAME_LEN}"
        )));
    }
    let mut payload = vec![0u8; len as usize];
    let got = read_full(reader, &mut payload)?;
    if got < payload.len() {
        return Err(BridgeError::Framing(format!(
            "truncated payload ({got} of {len} bytes)"
        )));
    }
    Message::from_payload(&payload).map(Some)
}

pub fn write_frame<W: Write + ?Sized>(
    writer: &mut W,
    message: &Message,
) -> Result<(), BridgeError> {
    writer.write_all(&encode_frame(message))?;
    writer.flush()?;
    Ok(())
}

fn read_full<R: Read + ?Sized>(reader: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_is_big_endian_payload_length() {
        let frame = encode_frame(&Message::Shutdown);
        assert_eq!(&frame[..4], &[0, 0, 0, 19]);
        assert_eq!(&frame[4..], br#"{"type":"shutdown"}"#);
        assert_eq!(decode_frame(&frame).unwrap(), Message::Shutdown);
    }

    #[test]
    fn truncation_is_a_framing_error() {
        let frame = encode_frame(&Message::Shutdown);
        for cut in [2, 4, 10, frame.len() - 1] {
            let mut reader = &frame[..cut];
            assert!(
                matches!(read_frame(&mut reader), Err(BridgeError::Framing(_))),
                "cut {cut}"
            );
            assert!(matches!(
                decode_frame(&frame[..cut]),
                Err(BridgeError::Framing(_))
            ));
        }
        let mut empty: &[u8] = &[];
        assert!(read_frame(&mut empty).unwrap().is_none());
    }

    #[test]
    fn oversize_and_trailing_rejected() {
        let mut reader: &[u8] = &[0xff, 0xff, 0xff, 0xff];
        assert!(matches!(
            read_frame(&mut reader),
            Err(BridgeError::Framing(_))
        ));
        let mut frame = encode_frame(&Message::Shutdown);
        frame.push(b' ');
        assert!(matches!(decode_frame(&frame), Err(BridgeError::Framing(_))));
    }

    #[test]
    fn consecutive_frames_on_one_stream() {
        let mut stream = encode_frame(&Message::Shutdown);
        stream.extend(encode_frame(&Message::SetTarget {
            image_path: "a.png".into(),
        }));
        let mut reader = stream.as_slice();
        assert_eq!(read_frame(&mut reader).unwrap(), Some(Message::Shutdown));
        assert!(matches!(
            read_frame(&mut reader).unwrap(),
            Some(Message::SetTarget { .. })
        ));
        assert_eq!(read_frame(&mut reader).unwrap(), None);
    }
}
