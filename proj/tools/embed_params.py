#!/usr/bin/env python3
"""Regenerate include/clachar/bundled_params.hpp from params/*.params."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
out = ['#pragma once', '',
       '// Default parameter files compiled into the library. Kept byte-identical to',
       '// params/*.params (checked by the test suite).', '',
       'namespace clachar::bundled {', '']
for name, var in [('si', 'kSiParams'), ('cnt', 'kCntParams'), ('hybrid', 'kHybridParams')]:
    txt = (root / 'params' / f'{name}.params').read_text()
    out.append(f'inline constexpr const char* {var} = R"PARAMS({txt})PARAMS";')
    out.append('')
out.append('}  // namespace clachar::bundled')
(root / 'include' / 'clachar' / 'bundled_params.hpp').write_text('\n'.join(out) + '\n')
