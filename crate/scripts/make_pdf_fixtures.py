#!/usr/bin/env python3
"""Writes the hand-built PDF fixtures used by the gridlock-pdf and CLI tests.

Every file is assembled object by object so the xref offsets are exact.
Output is deterministic; rerunning reproduces the committed bytes.
"""
import sys
import zlib
from pathlib import Path

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "crates/pdf/tests/fixtures"


def stream(content: bytes, extra: str = "", compress: bool = False) -> bytes:
    if compress:
        content = zlib.compress(content, 9)
        extra = "/Filter /FlateDecode " + extra
    return b"<< /Length %d %s>>\nstream\n" % (len(content), extra.encode()) + content + b"\nendstream"


def build(objects, trailer_extra: str = "", version: str = "1.4") -> bytes:
    out = bytearray(b"%PDF-" + version.encode() + b"\n%\xe2\xe3\xcf\xd3\n")
    offsets = []
    for i, body in enumerate(objects, start=1):
        if isinstance(body, str):
            body = body.encode()
        offsets.append(len(out))
        out += b"%d 0 obj\n" % i + body + b"\nendobj\n"
    xref = len(out)
    out += b"xref\n0 %d\n0000000000 65535 f \n" % (len(objects) + 1)
    for off in offsets:
        out += b"%010d 00000 n \n" % off
    out += b"trailer\n<< /Size %d /Root 1 0 R %s>>\nstartxref\n%d\n%%%%EOF\n" % (len(objects) + 1, trailer_extra.encode(), xref)
    return bytes(out)


def one_page(content: bytes, resources: str = "<< >>", size=(200, 200)) -> bytes:
    return build([
        "<< /Type /Catalog /Pages 2 0 R >>",
        "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 %d %d] /Resources %s /Contents 4 0 R >>" % (size[0], size[1], resources),
        stream(content),
    ])


HELV = "<< /Font << /F1 << /Type /Font /Subtype /Type1 /BaseFont /Helvetica >> >> >>"


def grid_content(x0, y0, col_w, row_h, rows, cols, bar=0.6):
    """Table rules as thin filled bars, the way many generators draw them."""
    ops = []
    width, height = col_w * cols, row_h * rows
    for r in range(rows + 1):
        y = y0 + r * row_h
        ops.append("%.2f %.2f %.2f %.2f re f" % (x0, y - bar / 2, width, bar))
    for c in range(cols + 1):
        x = x0 + c * col_w
        ops.append("%.2f %.2f %.2f %.2f re f" % (x - bar / 2, y0, bar, height))
    return "\n".join(ops)


def grid_table() -> bytes:
    # 3x3 grid, 80x20 cells, top-left cell text per cell; page 2 draws the
    # same table with stroked lines inside a scaled form XObject
    rows, cols, cw, rh = 3, 3, 80.0, 20.0
    x0, y0 = 40.0, 300.0
    body = [grid_content(x0, y0, cw, rh, rows, cols), "BT /F1 9 Tf"]
    for r in range(rows):
        for c in range(cols):
            # row 0 is the top row; PDF y grows upward
            bx = x0 + c * cw + 4
            by = y0 + (rows - 1 - r) * rh + 6
            body.append("1 0 0 1 %.2f %.2f Tm (r%dc%d) Tj" % (bx, by, r, c))
    body.append("1 0 0 1 40 380 Tm (Quarterly summary) Tj ET")
    body.append("q 40 0 0 30 40 200 cm /Im1 Do Q")
    page1 = "\n".join(body).encode()
    lines = []
    for r in range(rows + 1):
        lines.append("0 %d m 240 %d l" % (r * 20, r * 20))
    for c in range(cols + 1):
        lines.append("%d 0 m %d 60 l" % (c * 80, c * 80))
    form = ("\n".join(lines) + "\nS").encode()
    page2 = b"q 1 0 0 1 40 300 cm /Fm1 Do Q"
    image = b"\x00\x80\xff\x40"
    return build([
        "<< /Type /Catalog /Pages 2 0 R >>",
        "<< /Type /Pages /Kids [3 0 R 5 0 R] /Count 2 /MediaBox [0 0 320 420] >>",
        "<< /Type /Page /Parent 2 0 R /Resources << /Font << /F1 7 0 R >> /XObject << /Im1 8 0 R >> >> /Contents 4 0 R >>",
        stream(page1, compress=True),
        "<< /Type /Page /Parent 2 0 R /Resources << /XObject << /Fm1 9 0 R >> >> /Contents 6 0 R >>",
        stream(page2),
        "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
        stream(image, "/Type /XObject /Subtype /Image /Width 2 /Height 2 /ColorSpace /DeviceGray /BitsPerComponent 8 "),
        stream(form, "/Type /XObject /Subtype /Form /BBox [-1 -1 241 61] "),
    ])


TOUNICODE = b"""/CIDInit /ProcSet findresource begin
12 dict begin
begincmap
/CMapName /Test-UCS def
1 begincodespacerange <0000> <FFFF> endcodespacerange
2 beginbfchar
<0001> <0054>
<0002> <006F>
endbfchar
1 beginbfrange
<0003> <0005> <0074>
endbfrange
endcmap
CMapName currentdict /CMap defineresource pop
end
end"""


def type0_text() -> bytes:
    # "Total" as 2-byte CIDs 1,2,3,4,5 -> T o t u v, fixed by the CMap:
    # 3->t 4->u 5->v, so the string is <0001 0002 0003> plus "al" via
    # a second TJ run on a WinAnsi font; an inline image sits in between
    content = b"""BT /F0 10 Tf 20 150 Td [<000100020003> -400 <0004>] TJ ET
q 10 0 0 10 20 100 cm BI /W 2 /H 1 /BPC 8 /CS /G ID \x00\xff EI Q
BT /F1 10 Tf 20 80 Td (caf\xe9) Tj ET
BT /F9 10 Tf 20 60 Td (zz) Tj ET"""
    return build([
        "<< /Type /Catalog /Pages 2 0 R >>",
        "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 200 200] /Resources << /Font << /F0 5 0 R /F1 7 0 R >> >> /Contents 4 0 R >>",
        stream(content),
        "<< /Type /Font /Subtype /Type0 /BaseFont /Test /Encoding /Identity-H /DescendantFonts [6 0 R] /ToUnicode 8 0 R >>",
        "<< /Type /Font /Subtype /CIDFontType2 /BaseFont /Test /DW 1000 /W [1 [600 500] 3 5 300] "
        "/CIDSystemInfo << /Registry (Adobe) /Ordering (Identity) /Supplement 0 >> /FontDescriptor 9 0 R >>",
        "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding << /BaseEncoding /WinAnsiEncoding /Differences [99 /c 233 /eacute] >> >>",
        stream(TOUNICODE),
        "<< /Type /FontDescriptor /FontName /Test /Flags 4 /FontBBox [0 -200 1000 800] /ItalicAngle 0 "
        "/Ascent 800 /Descent -200 /CapHeight 700 /StemV 80 >>",
    ])


def xref_stream_doc() -> bytes:
    """PDF 1.5 layout: catalog, page tree and font inside a compressed object
    stream, located through a predictor-encoded xref stream."""
    content = zlib.compress(b"0 0 100 50 re S\nBT /F1 12 Tf 10 20 Td (Hi) Tj ET", 9)
    packed = [
        (1, b"<< /Type /Catalog /Pages 2 0 R >>"),
        (2, b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>"),
        (3, b"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 200 200] /Resources << /Font << /F1 4 0 R >> >> /Contents 5 0 R >>"),
        (4, b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>"),
    ]
    header = b""
    bodies = b""
    for num, body in packed:
        header += b"%d %d " % (num, len(bodies))
        bodies += body + b"\n"
    objstm = zlib.compress(header + bodies, 9)

    out = bytearray(b"%PDF-1.5\n%\xe2\xe3\xcf\xd3\n")
    off5 = len(out)
    out += b"5 0 obj\n<< /Length %d /Filter /FlateDecode >>\nstream\n" % len(content) + content + b"\nendstream\nendobj\n"
    off6 = len(out)
    out += b"6 0 obj\n<< /Type /ObjStm /N %d /First %d /Length %d /Filter /FlateDecode >>\nstream\n" % (
        len(packed), len(header), len(objstm)) + objstm + b"\nendstream\nendobj\n"
    off7 = len(out)
    # entries 0..7, W [1 2 1]
    rows = [(0, 0, 255), (2, 6, 0), (2, 6, 1), (2, 6, 2), (2, 6, 3), (1, off5, 0), (1, off6, 0), (1, off7, 0)]
    raw = b"".join(bytes([t, (f2 >> 8) & 255, f2 & 255, f3]) for t, f2, f3 in rows)
    # PNG Up predictor, 4 columns
    encoded = bytearray()
    prev = bytes(4)
    for i in range(0, len(raw), 4):
        row = raw[i:i + 4]
        encoded += b"\x02" + bytes((row[k] - prev[k]) & 255 for k in range(4))
        prev = row
    data = zlib.compress(bytes(encoded), 9)
    out += (b"7 0 obj\n<< /Type /XRef /Size 8 /W [1 2 1] /Root 1 0 R /Length %d /Filter /FlateDecode "
            b"/DecodeParms << /Columns 4 /Predictor 12 >> >>\nstream\n" % len(data)) + data + b"\nendstream\nendobj\n"
    out += b"startxref\n%d\n%%%%EOF\n" % off7
    return bytes(out)


def scanned() -> bytes:
    """Image-only page: a 3-column, 2-row ruled grid drawn as pixels."""
    w, h = 600, 400
    px = bytearray([255]) * (w * h)
    xs = [50, 217, 383, 550]
    ys = [100, 200, 300]
    for y in ys:
        for t in range(3):
            row = (y + t) * w
            px[row + xs[0]: row + xs[-1] + 3] = bytes(xs[-1] + 3 - xs[0])
    for x in xs:
        for y in range(ys[0], ys[-1] + 3):
            px[y * w + x: y * w + x + 3] = bytes(3)
    data = zlib.compress(bytes(px), 9)
    image = (b"<< /Type /XObject /Subtype /Image /Width %d /Height %d /ColorSpace /DeviceGray "
             b"/BitsPerComponent 8 /Filter /FlateDecode /Length %d >>\nstream\n" % (w, h, len(data))) + data + b"\nendstream"
    return build([
        "<< /Type /Catalog /Pages 2 0 R >>",
        "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 288 192] /Resources << /XObject << /Scan 5 0 R >> >> /Contents 4 0 R >>",
        stream(b"q 288 0 0 192 0 0 cm /Scan Do Q"),
        image,
    ])


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rect = one_page(b"0 0 100 50 re S")
    files = {
        "rect_rules.pdf": rect,
        "text_hi.pdf": one_page(b"BT /F1 12 Tf 10 20 Td (Hi) Tj ET", HELV),
        "empty_stream.pdf": one_page(b""),
        "truncated.pdf": rect[: len(rect) * 3 // 5],
        "encrypted.pdf": build([
            "<< /Type /Catalog /Pages 2 0 R >>",
            "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
            "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 200 200] >>",
            "<< /Filter /Standard /V 1 /R 2 /O <00> /U <00> /P -4 >>",
        ], "/Encrypt 4 0 R /ID [<01> <01>] "),
        "grid_table.pdf": grid_table(),
        "type0_text.pdf": type0_text(),
        "xref_stream.pdf": xref_stream_doc(),
        "scanned.pdf": scanned(),
        "unsupported_filter.pdf": build([
            "<< /Type /Catalog /Pages 2 0 R >>",
            "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
            "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 200 200] /Contents 4 0 R >>",
            "<< /Length 4 /Filter /LZWDecode >>\nstream\n\x80\x0b\x60\x50\nendstream",
        ]),
    }
    for name, data in files.items():
        (OUT / name).write_bytes(data)


if __name__ == "__main__":
    main()
