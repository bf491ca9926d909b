#!/usr/bin/env python3
"""Rasterizer with the same contract as the default Ghostscript template.

usage: mupdf_rasterize.py INPUT PAGE DPI OUTPUT
PAGE is 1-based; OUTPUT is an 8-bit grayscale PNG.

    GRIDLOCK_RASTERIZER="python3 scripts/mupdf_rasterize.py {input} {page} {dpi} {output}"
"""
import sys

import pymupdf


def main() -> int:
    if len(sys.argv) != 5:
        print(__doc__, file=sys.stderr)
        return 2
    src, page, dpi, out = sys.argv[1], int(sys.argv[2]), float(sys.argv[3]), sys.argv[4]
    with pymupdf.open(src) as doc:
        if not 1 <= page <= doc.page_count:
            print(f"page {page} out of range (1..{doc.page_count})", file=sys.stderr)
            return 1
        pix = doc[page - 1].get_pixmap(matrix=pymupdf.Matrix(dpi / 72, dpi / 72), colorspace=pymupdf.csGRAY, alpha=False)
        pix.save(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
