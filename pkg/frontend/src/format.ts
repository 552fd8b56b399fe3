export function ordinal(n: number): string {
  const tail = n % 100;
  if (tail >= 11 && tail <= 13) return `${n}th`;
  switch (n % 10) {
    case 1:
      return `${n}st`;
    case 2:
      return `${n}nd`;
    case 3:
      return `${n}rd`;
    default:
      return `${n}th`;
  }
}

export function resultLabel(result: { outcome: string; survival_months: number | null }): string {
  if (result.survival_months === null) return result.outcome;
  return `${result.outcome}, ${result.survival_months} months`;
}

export function percent(x: number): string {
  return `${(100 * x).toFixed(2)}%`;
}
