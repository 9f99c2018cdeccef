import init, { classify, region_map, load_curves, class_names } from "./pkg/udn_cache_wasm.js";

const PX = 48;
const COLORS = ["#e8e8e8", "#9ecae1", "#6baed6", "#fdae6b", "#fd8d3c", "#e6550d", "#a63603", "#74c476"];
const UNKNOWN = 254;
const CURVES = [
  ["a", "scheme A", "#3182bd"],
  ["b", "scheme B", "#31a354"],
  ["uncoded", "uncoded", "#636363"],
  ["benchmark_d", "benchmark D", "#e6550d"],
];

const $ = (id) => document.getElementById(id);
let names = [];
let picked = null;

function dims() {
  const clamp = (v) => Math.min(12, Math.max(3, v | 0));
  return [clamp($("k1").value), clamp($("k2").value), Number($("r").value)];
}

function hex(c) {
  return [1, 3, 5].map((i) => parseInt(c.slice(i, i + 2), 16));
}

function drawMap() {
  const [k1, k2, r] = dims();
  $("rval").textContent = r.toFixed(3);
  const canvas = $("map");
  canvas.width = k1 * PX;
  canvas.height = k2 * PX;
  const ctx = canvas.getContext("2d");
  const cells = region_map(k1, k2, r, PX);
  const img = ctx.createImageData(canvas.width, canvas.height);
  cells.forEach((c, p) => {
    const [red, green, blue] = c === UNKNOWN ? [0, 0, 0] : hex(COLORS[c]);
    img.data.set([red, green, blue, 255], 4 * p);
  });
  ctx.putImageData(img, 0, 0);

  const reached = new Set((picked?.nodes ?? []).map(([a, b]) => `${a},${b}`));
  for (let a = 0; a < k1; a++) {
    for (let b = 0; b < k2; b++) {
      ctx.beginPath();
      ctx.arc((a + 0.5) * PX, (b + 0.5) * PX, reached.has(`${a},${b}`) ? 6 : 3, 0, 2 * Math.PI);
      ctx.fillStyle = reached.has(`${a},${b}`) ? "#c00" : "#222";
      ctx.fill();
    }
  }
  if (picked) {
    ctx.beginPath();
    ctx.arc(picked.px, picked.py, 4, 0, 2 * Math.PI);
    ctx.strokeStyle = "#c00";
    ctx.lineWidth = 2;
    ctx.stroke();
  }
  const present = new Set(cells);
  $("legend").innerHTML = names
    .map((n, i) => (present.has(i) ? `<span><i style="background:${COLORS[i]}"></i>${n}</span>` : ""))
    .join("");
}

function pick(ev) {
  const [k1, k2, r] = dims();
  const rect = $("map").getBoundingClientRect();
  const px = ev.clientX - rect.left;
  const py = ev.clientY - rect.top;
  const x = px / PX - 0.5;
  const y = py / PX - 0.5;
  try {
    const c = JSON.parse(classify(k1, k2, r, x, y));
    picked = { ...c, px, py };
    const nodes = c.nodes.map(([a, b]) => `(${a},${b})`).join(" ");
    $("point").textContent =
      `user at (${x.toFixed(2)}, ${y.toFixed(2)}), ${c.regime} regime\n` +
      `reaches ${c.nodes.length} cache(s): ${nodes}\n` +
      `sub-type ${c.family ?? "none"}, anchored at (${c.anchor.join(",")})`;
  } catch (e) {
    picked = null;
    $("point").textContent = String(e);
  }
  drawMap();
}

function drawLoads() {
  const [k1, k2] = dims();
  const curves = JSON.parse(load_curves(k1, k2, $("regime").value));
  const log = $("log").checked;
  const canvas = $("loads");
  const ctx = canvas.getContext("2d");
  const [w, h, pad] = [canvas.width, canvas.height, 44];
  ctx.clearRect(0, 0, w, h);

  const k = curves.t.length - 1;
  const values = CURVES.flatMap(([key]) => curves[key]).filter((v) => v > 0);
  const top = Math.max(...values);
  const bottom = log ? Math.min(...values) : 0;
  const fy = (v) => (log ? Math.log10(v) : v);
  const sx = (t) => pad + ((w - 2 * pad) * t) / k;
  const sy = (v) => h - pad - ((h - 2 * pad) * (fy(v) - fy(bottom || 1))) / (fy(top) - fy(bottom || 1) || 1);

  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText(`t = K1 K2 M/N (0 to ${k})`, w / 2 - 50, h - 12);
  ctx.fillText(top.toPrecision(3), 4, pad / 2 + 4);
  ctx.fillText(log ? bottom.toPrecision(2) : "0", 4, h - pad);

  for (const [key, , color] of CURVES) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let drawing = false;
    curves[key].forEach((v, t) => {
      if (log && v <= 0) return;
      if (drawing) ctx.lineTo(sx(t), sy(v));
      else ctx.moveTo(sx(t), sy(v));
      drawing = true;
    });
    ctx.stroke();
  }
  $("loadkey").innerHTML = CURVES.map(
    ([, label, color]) => `<span style="color:${color};margin-right:1rem">&#9632; ${label}</span>`,
  ).join("");
}

await init();
names = JSON.parse(class_names());
for (const id of ["k1", "k2", "r"]) {
  $(id).addEventListener("input", () => {
    picked = null;
    $("point").textContent = "";
    drawMap();
    if (id !== "r") drawLoads();
  });
}
$("regime").addEventListener("change", drawLoads);
$("log").addEventListener("change", drawLoads);
$("map").addEventListener("click", pick);
drawMap();
drawLoads();
