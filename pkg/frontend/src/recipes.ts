/**
 * Figure recipes: which CSV columns to plot, on which scales, with which
 * guide overlays.  Recipes only reference columns that exist in the named
 * CSVs; overlay curves come from CSV columns (the analytic square-well
 * oracle is a column of the fig3/figS3 tables) and slope guides are anchored
 * at data points — the renderer never recomputes physics.
 */

import type { ScaleKind } from "./svg.js";

export interface RowFilter {
  column: string;
  equals?: number;
  lessThan?: number;
  greaterThan?: number;
}

export interface SeriesSpec {
  x: string;
  y: string;
  mark: "points" | "line" | "both";
  color: string;
  dash?: string;
  label: string;
  filters?: RowFilter[];
  /** mark the data point with the largest y (e.g. curve optima) */
  markMax?: boolean;
}

export interface SlopeGuide {
  /** log-log slope of the guide line */
  slope: number;
  /** guide passes through the first point of this series (by label) */
  anchorSeries: string;
  color: string;
  dash?: string;
  label: string;
}

export interface PanelSpec {
  yLabel: string;
  yScale: ScaleKind;
  series: SeriesSpec[];
  guides?: SlopeGuide[];
}

export interface FigureRecipe {
  name: string;
  csv: string;
  xLabel: string;
  xColumn: string;
  xScale: ScaleKind;
  panels: PanelSpec[];
}

const FIG2_ETAS = ["0.1", "10", "50"];
const FIG2_COLORS = ["#777777", "#1f77b4", "#d62728"];

export const RECIPES: FigureRecipe[] = [
  {
    name: "fig2",
    csv: "fig2.csv",
    xLabel: "kx",
    xColumn: "x",
    xScale: "linear",
    panels: [
      {
        yLabel: "U / U0",
        yScale: "linear",
        series: FIG2_ETAS.map((eta, i) => ({
          x: "x",
          y: `u_eta${eta}`,
          mark: "line" as const,
          color: FIG2_COLORS[i],
          label: `eta = ${eta}`,
        })),
      },
      {
        yLabel: "seen intensity n(x) f(x)",
        yScale: "linear",
        series: FIG2_ETAS.map((eta, i) => ({
          x: "x",
          y: `iseen_eta${eta}`,
          mark: "line" as const,
          color: FIG2_COLORS[i],
          label: `eta = ${eta}`,
        })),
      },
    ],
  },
  {
    name: "fig3",
    csv: "fig3.csv",
    xLabel: "back-action parameter eta",
    xColumn: "eta",
    xScale: "log10",
    panels: [
      {
        yLabel: "<I(eta)> / <I_tweezer>",
        yScale: "linear",
        series: [
          {
            x: "eta", y: "ratio", mark: "both", color: "#1f77b4",
            label: "simulated",
          },
          {
            x: "eta", y: "s17_oracle", mark: "line", color: "#d62728",
            dash: "5,3", label: "square-well analytic",
          },
        ],
      },
    ],
  },
  {
    name: "figS3",
    csv: "figS3.csv",
    xLabel: "back-action parameter eta",
    xColumn: "eta",
    xScale: "log10",
    panels: [
      {
        yLabel: "<I(eta)> / <I_tweezer>",
        yScale: "linear",
        series: [
          {
            x: "eta", y: "ratio", mark: "both", color: "#1f77b4",
            label: "simulated",
          },
          {
            x: "eta", y: "s17_oracle", mark: "line", color: "#d62728",
            dash: "5,3", label: "square-well analytic",
          },
        ],
      },
    ],
  },
  {
    name: "fig5",
    csv: "fig5.csv",
    xLabel: "confinement k dx",
    xColumn: "kdx",
    xScale: "log10",
    panels: [
      {
        yLabel: "<I> alpha / (c eps0 E_kin)",
        yScale: "log10",
        series: [
          {
            x: "kdx", y: "j_over_ekin", mark: "points", color: "#555555",
            label: "tweezer reference",
            filters: [{ column: "regime", equals: 0 },
                      { column: "eta", lessThan: 1 }],
          },
          {
            x: "kdx", y: "j_over_ekin", mark: "points", color: "#2ca02c",
            label: "high back-action",
            filters: [{ column: "regime", equals: 2 }],
          },
          {
            x: "kdx", y: "j_over_ekin", mark: "points", color: "#1f77b4",
            label: "harmonic back-action",
            filters: [{ column: "regime", equals: 1 }],
          },
          {
            x: "kdx", y: "j_over_ekin", mark: "points", color: "#9467bd",
            label: "kd below 2/eta",
            filters: [{ column: "regime", equals: 0 },
                      { column: "eta", greaterThan: 1 }],
          },
        ],
        guides: [
          {
            slope: -2, anchorSeries: "tweezer reference", color: "#555555",
            label: "slope -2",
          },
          {
            slope: -1, anchorSeries: "high back-action", color: "#2ca02c",
            label: "slope -1",
          },
          {
            slope: -2, anchorSeries: "harmonic back-action", color: "#1f77b4",
            dash: "5,3", label: "slope -2 (suppressed)",
          },
        ],
      },
    ],
  },
  {
    name: "figS1",
    csv: "figS1.csv",
    xLabel: "particle size kr",
    xColumn: "kr",
    xScale: "linear",
    panels: [
      {
        yLabel: "back-action parameter eta",
        yScale: "linear",
        series: [
          {
            x: "kr", y: "eta_Q10000", mark: "line", color: "#1f77b4",
            label: "Q = 1e4", markMax: true,
          },
          {
            x: "kr", y: "eta_Q100000", mark: "line", color: "#2ca02c",
            label: "Q = 1e5", markMax: true,
          },
          {
            x: "kr", y: "eta_Q1e+06", mark: "line", color: "#d62728",
            label: "Q = 1e6", markMax: true,
          },
        ],
      },
    ],
  },
];
