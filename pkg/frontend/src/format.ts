/** Number formatting.
 *
 * The explorer never does arithmetic on engine values; it only formats
 * them.  Two forms exist:
 *
 * - display(): shortest round-trip string (String(x)), so every rendered
 *   number parses back to the exact value the API sent;
 * - canonicalNumber(): the cross-language canonical form shared with the
 *   engine (17 significant digits, exponential, signed unpadded exponent);
 *   used when comparing values across CLI, API and UI byte for byte.
 */

export function canonicalNumber(x: number): string {
  return x.toExponential(16);
}

export function display(x: number): string {
  return String(x);
}

/** Compact 6-significant-digit money rendering for chart labels. */
export function money(x: number): string {
  if (x === 0) return '0';
  const abs = Math.abs(x);
  if (abs >= 1e-4 && abs < 1e7) {
    const digits = Math.max(0, 5 - Math.floor(Math.log10(abs)));
    return x.toFixed(digits).replace(/\.?0+$/, '');
  }
  return x.toExponential(5);
}
